//! `qdp-lab`: experiments and verification suites for the Quantum Decoding Problem.

mod commands;
mod svg;
mod table;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qdp_core::verify::Suite;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "qdp-lab", version, about = "Exact classical simulation of the Quantum Decoding Problem")]
struct Cli {
    /// Worker threads (defaults to the number of cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-symbol Holevo and Shannon capacities and the entropic uncertainty sum.
    Capacity(ExperimentArgs),
    /// Mean PGM success probability over random codes for k = 1..n-1.
    PgmSweep(ExperimentArgs),
    /// Minimum-weight statistics of the dual-codeword sampler.
    SampleDual(ExperimentArgs),
    /// Rank-metric noise tables, Fourier duality and entropies.
    RankLab(ExperimentArgs),
    /// Run the invariant suites and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentArgs {
    /// Field order q = p^s [default: 2, or the field carried by the noise JSON].
    #[arg(long)]
    pub q: Option<usize>,
    /// Extension degree s; must agree with q.
    #[arg(long)]
    pub s: Option<u32>,
    /// Code length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Code dimension.
    #[arg(long, conflicts_with = "rate")]
    pub k: Option<usize>,
    /// Code rate R; k = floor(R n).
    #[arg(long)]
    pub rate: Option<f64>,
    /// Noise as JSON or preset:noiseless | preset:uniform | preset:bernoulli:P | preset:gibbs:LAMBDA | preset:rank:A:B:T.
    #[arg(long, default_value = "preset:bernoulli:0.1")]
    pub noise: String,
    /// Typical-set slack.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Random codes per configuration.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Samples per code.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Weight margin above d_min counted by sample-dual.
    #[arg(long, default_value_t = 2.0)]
    pub margin: f64,
    /// Output file (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write an SVG plot next to --out.
    #[arg(long, requires = "out")]
    #[serde(skip)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
struct VerifyArgs {
    /// Restrict to these suites (repeatable): field, codes, spectral, noise, analysis, pgm, sampler.
    #[arg(long = "suite")]
    suites: Vec<Suite>,
    /// Perturb one character table entry before running the field suite.
    #[arg(long)]
    inject_fault: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn run_experiment(name: &str, args: &ExperimentArgs) -> Result<()> {
    let ctx = commands::Context::resolve(name, args)?;
    let out = match name {
        "capacity" => commands::capacity(&ctx)?,
        "pgm-sweep" => commands::pgm_sweep(&ctx)?,
        "sample-dual" => commands::sample_dual(&ctx)?,
        "rank-lab" => commands::rank_lab(&ctx)?,
        other => bail!("unknown command {other}"),
    };
    let schema = table::schema()?;
    let csv = out.table.to_csv()?;
    table::validate_csv(&schema, out.table.name, &csv)?;
    let text = match args.format {
        Format::Csv => csv,
        Format::Json => out.table.to_json(&ctx.config_json(args)?)?,
    };
    emit(args.out.as_ref(), &text)?;
    if args.svg {
        let path = args.out.as_ref().expect("clap requires --out").with_extension("svg");
        std::fs::write(&path, out.svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let suites = if args.suites.is_empty() { Suite::ALL.to_vec() } else { args.suites.clone() };
    let opts = qdp_core::verify::VerifyOptions {
        suites,
        fault: args.inject_fault.then(Default::default),
        seed: args.seed,
        caps: qdp_core::Caps::from_env()?,
    };
    let reports = qdp_core::verify::run(&opts)?;
    let pass = reports.iter().all(|r| r.pass);
    let doc = serde_json::json!({
        "pass": pass,
        "seed": args.seed,
        "fault_injected": args.inject_fault,
        "suites": reports,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(args.out.as_ref(), &text)?;
    for r in reports.iter().filter(|r| !r.pass) {
        for c in r.checks.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {} {} [{}]: lhs {} rhs {} tol {}", r.suite, c.name, c.instance, c.lhs, c.rhs, c.tolerance);
        }
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Capacity(a) => run_experiment("capacity", a).map(|_| true),
        Command::PgmSweep(a) => run_experiment("pgm-sweep", a).map(|_| true),
        Command::SampleDual(a) => run_experiment("sample-dual", a).map(|_| true),
        Command::RankLab(a) => run_experiment("rank-lab", a).map(|_| true),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
