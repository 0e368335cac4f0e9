//! `cmtrace` command-line front end.

mod commands;
mod config;
mod points;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cmtrace", version, about = "Trace-polynomial Poisson calculus on matrix pairs")]
pub struct Cli {
    /// Emit one JSON record per result on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Read further flags from a file of `key = value` lines; flags given on
    /// the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ClosureArgs {
    /// Generator file: one expression per line, optionally `name := expr`.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    pub generators: Option<PathBuf>,

    /// Built-in generator set: `F` or `D`.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,

    /// Degree cap for the `D` preset.
    #[arg(long, default_value_t = 4)]
    pub preset_cap: usize,

    #[arg(long, default_value_t = 6)]
    pub budget: usize,

    #[arg(long, default_value_t = 0)]
    pub slack: usize,

    /// `ambient` or `rank-one`.
    #[arg(long, default_value = "ambient")]
    pub mode: String,

    #[arg(long, default_value_t = cmtrace::verify::DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub threads: usize,

    /// Stop once the basis grows past this many elements.
    #[arg(long, default_value_t = 20_000)]
    pub dimension_cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Poisson bracket of two expressions.
    Bracket {
        f: String,
        g: String,
        /// Use polynomials in `x1..xN, y1..yN` with the canonical bracket.
        #[arg(long, value_name = "N")]
        canonical: Option<usize>,
    },
    /// Rank-one normal form; `B` may appear inside trace words.
    Reduce {
        expr: String,
        /// Resolve a single `B` through the `tr(W·B)` rules instead of
        /// expanding it as `XY - YX`.
        #[arg(long)]
        keep_b_trace: bool,
    },
    /// Degree-truncated Lie closure with target membership.
    Closure {
        #[command(flatten)]
        closure: ClosureArgs,
        /// Targets, in the generator file format.
        #[arg(long, value_name = "FILE")]
        targets: Option<PathBuf>,
        /// Write each target certificate to `DIR/<k>.cert`.
        #[arg(long, value_name = "DIR")]
        cert_dir: Option<PathBuf>,
    },
    /// Membership of one expression in a closure.
    Membership {
        #[command(flatten)]
        closure: ClosureArgs,
        #[arg(long)]
        target: String,
        /// Write the certificate here.
        #[arg(long, value_name = "FILE")]
        cert_out: Option<PathBuf>,
    },
    /// Recompute the value of a certificate from its generators.
    Replay {
        cert: PathBuf,
        #[arg(long, value_name = "FILE", conflicts_with = "preset")]
        generators: Option<PathBuf>,
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
        #[arg(long, default_value_t = 4)]
        preset_cap: usize,
        #[arg(long, default_value = "ambient")]
        mode: String,
        /// Expected value; a mismatch exits with status 1.
        #[arg(long)]
        claim: Option<String>,
    },
    /// Wilson point on the rank-one locus.
    Wilson {
        /// Distinct eigenvalues of X, comma separated (`1,2+0.5i,-1i`).
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        /// Diagonal of Y.
        #[arg(long, allow_hyphen_values = true)]
        betas: String,
    },
    /// Apply a closed-form flow to a point.
    Flow {
        /// `x_shift_id`, `x_shift_yk(k)`, `y_shift_xk(k)`, `y_shift_trx_id`,
        /// `y_shift_trxj(j)`, `x_shift_tryj(j)` or `scale`.
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// `alphas = ...` and `betas = ...`, or `x = ...` and `y = ...` with
        /// row-major entries; entries are complex literals or `re,im` pairs
        /// separated by spaces.
        #[arg(long, value_name = "FILE")]
        point: PathBuf,
    },
    /// Run verification suites.
    Verify {
        /// Suite name or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = cmtrace::verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        slack: Option<usize>,
        /// Write the records here instead of stdout.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Monomial coverage of the shear closure on `T*C^n`.
    Coverage {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        slack: usize,
    },
}

/// Outcome of a subcommand that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Failed,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match config::parse_with_config(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
