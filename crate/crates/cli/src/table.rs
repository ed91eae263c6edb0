//! Output tables, their schema, and CSV/JSON emission.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;

pub const SCHEMA_TEXT: &str = include_str!("../schema/csv_schema.json");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Str(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::from(v.to_string()),
            Cell::Str(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Null => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
    }

    pub fn to_json(&self, config: &Value) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("config".into(), config.clone());
        doc.insert("table".into(), Value::from(self.name));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Integer,
    Number,
    String,
    Boolean,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
    #[serde(default)]
    pub nullable: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TableSchema {
    pub columns: Vec<ColumnSchema>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Schema {
    pub tables: BTreeMap<String, TableSchema>,
}

pub fn schema() -> Result<Schema> {
    serde_json::from_str(SCHEMA_TEXT).context("parsing shipped CSV schema")
}

fn cell_ok(text: &str, col: &ColumnSchema) -> bool {
    if text.is_empty() {
        return col.nullable || col.kind == ColumnType::String;
    }
    match col.kind {
        ColumnType::Integer => text.parse::<i64>().is_ok(),
        ColumnType::Number => text.parse::<f64>().is_ok(),
        ColumnType::Boolean => text == "true" || text == "false",
        ColumnType::String => true,
    }
}

/// Checks CSV text against the schema entry for `table`.
pub fn validate_csv(schema: &Schema, table: &str, text: &str) -> Result<()> {
    let ts = schema.tables.get(table).ok_or_else(|| anyhow!("table {table} missing from schema"))?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = ts.columns.iter().map(|c| c.name.as_str()).collect();
    if header != expected {
        bail!("table {table}: header {header:?} does not match schema {expected:?}");
    }
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (text, col) in rec.iter().zip(&ts.columns) {
            if !cell_ok(text, col) {
                bail!("table {table} row {}: column {} value {text:?} is not {:?}", line + 1, col.name, col.kind);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_schema_parses() {
        let s = schema().unwrap();
        for t in ["capacity", "capacity-rank", "pgm-sweep", "sample-dual", "rank-lab"] {
            assert!(s.tables.contains_key(t), "{t}");
        }
    }

    #[test]
    fn validation_catches_bad_cells() {
        let s = schema().unwrap();
        let mut t = Table::new("capacity-rank", &["q", "a", "b", "t", "h_closed", "h_exact"]);
        t.push(vec![2usize.into(), 2usize.into(), 2usize.into(), 1usize.into(), 0.75.into(), 0.7.into()]);
        validate_csv(&s, t.name, &t.to_csv().unwrap()).unwrap();
        let bad = "q,a,b,t,h_closed,h_exact\n2,2,2,x,0.75,0.7\n";
        assert!(validate_csv(&s, "capacity-rank", bad).is_err());
        let short = "q,a,b\n2,2,2\n";
        assert!(validate_csv(&s, "capacity-rank", short).is_err());
    }
}
