//! Command-line front end: argument definitions and the `run` entry point.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use config::PipelineConfig;

/// Overrides the working precision (bits) of the cached root intervals.
pub const PRECISION_ENV: &str = "TRACE_CENSUS_PRECISION";

#[derive(Debug, Parser)]
#[command(name = "trace-census", version, about = "Totally positive integers of given trace in totally real cubic fields")]
pub struct Cli {
    /// Field specification file (`poly = 1,a,b,c`, optional `basis = ...`)
    #[arg(long, global = true)]
    pub field: Option<PathBuf>,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = config::DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discriminant, trace generator, trace basis and embeddings
    Info,
    /// Fundamental units, regulator and signatures
    Units {
        /// Search radius in log space (grown automatically when omitted)
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Good sign characters and the good dual-lattice vectors near 0
    GoodPairs {
        /// Radius for the dual-lattice search
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
    },
    /// Number of totally positive integers of one trace
    Count {
        #[arg(long)]
        trace: i64,
        #[arg(long, default_value = "sweep")]
        counter: String,
    },
    /// N_a, r_a, E_a for a = 1..=X as CSV
    Series {
        #[arg(long)]
        xmax: usize,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "sweep")]
        counter: String,
    },
    /// Smoothed evaluation of L(1, v)
    Lvalue {
        /// Exponents e1e2e3, e.g. 011
        #[arg(long = "char")]
        character: String,
        #[arg(long, default_value_t = config::DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Predicted leading coefficient of S(X)
    Coeff {
        #[arg(long, default_value_t = config::DEFAULT_K)]
        k: u32,
        #[arg(long, default_value_t = config::DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Least-squares log-polynomial fit of S(X)
    Fit {
        #[arg(long, default_value_t = config::DEFAULT_DEGREE)]
        degree: usize,
        #[arg(long, default_value_t = config::DEFAULT_FIT_XMIN)]
        xmin: u64,
        #[arg(long)]
        xmax: u64,
        #[arg(long, default_value_t = config::DEFAULT_K)]
        k: u32,
        #[arg(long, default_value = "log20")]
        grid: String,
        /// Precomputed series CSV (computed on the fly when omitted)
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// CSV comparing S(X)/log^{k+1}X with the predicted coefficient
    Report {
        #[arg(long, default_value = "log20")]
        grid: String,
        #[arg(long, default_value_t = config::DEFAULT_FIT_XMIN)]
        xmin: u64,
        #[arg(long)]
        xmax: u64,
        #[arg(long, default_value_t = config::DEFAULT_K)]
        k: u32,
        #[arg(long, default_value_t = config::DEFAULT_CUTOFF)]
        cutoff: u64,
        /// Sub-leading coefficients `c1,c2` adding a three-term column
        #[arg(long, allow_hyphen_values = true)]
        sub_leading: Option<String>,
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Units, good pairs, series, L-values, coefficient and report in one run
    Pipeline {
        /// Run file with `key = value` lines
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        xmax: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        cutoff: Option<u64>,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check every registered counter against the oracle
    Verify {
        #[arg(long, default_value_t = 300)]
        max_trace: i64,
        /// Random exact sign probes
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
    },
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    let threads = match &cli.command {
        Command::Pipeline { config: Some(path), .. } => {
            cli.threads.or(PipelineConfig::from_path(path).ok().and_then(|c| c.threads))
        }
        _ => cli.threads,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building the thread pool")?;
    pool.install(|| commands::dispatch(&cli, out))
}
