//! Gaussian elimination over `F_q`.

use crate::field::{Elem, FieldSpec};

/// Reduces `rows` to reduced row echelon form in place, drops zero rows, and
/// returns the pivot column of each remaining row.
pub fn rref(field: &FieldSpec, rows: &mut Vec<Vec<Elem>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = field.inv(rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, pv));
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Rank; `rows` is left in reduced form.
pub fn rank_in_place(field: &FieldSpec, rows: &mut Vec<Vec<Elem>>) -> usize {
    rref(field, rows).len()
}

pub fn rank(field: &FieldSpec, rows: &[Vec<Elem>]) -> usize {
    rank_in_place(field, &mut rows.to_vec())
}

/// Basis of `{x ∈ F_q^ncols : R xᵀ = 0}` from an RREF matrix `R` with the given pivots.
pub fn nullspace_from_rref(
    field: &FieldSpec,
    reduced: &[Vec<Elem>],
    pivots: &[usize],
    ncols: usize,
) -> Vec<Vec<Elem>> {
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; ncols];
            v[free] = 1;
            for (row, &p) in reduced.iter().zip(pivots) {
                v[p] = field.neg(row[free]);
            }
            v
        })
        .collect()
}

/// `x·M` for a row vector `x` and matrix `M` given by rows.
pub fn row_times(field: &FieldSpec, x: &[Elem], rows: &[Vec<Elem>], ncols: usize) -> Vec<Elem> {
    let mut out = vec![0; ncols];
    for (&c, row) in x.iter().zip(rows) {
        if c == 0 {
            continue;
        }
        for (o, &r) in out.iter_mut().zip(row) {
            *o = field.add(*o, field.mul(c, r));
        }
    }
    out
}

/// `M·yᵀ`.
pub fn times_col(field: &FieldSpec, rows: &[Vec<Elem>], y: &[Elem]) -> Vec<Elem> {
    rows.iter().map(|row| field.dot(row, y)).collect()
}
