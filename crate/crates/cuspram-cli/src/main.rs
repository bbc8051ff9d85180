//! `cuspram`: ramification indices at the cusps of `X_0(N)` and the exact
//! local constants behind them.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 bad usage or input.

mod exact;
mod output;
mod ram;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuspram::gl2::DEFAULT_BUDGET;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "cuspram", version, about = "Ramification at the cusps of X_0(N) and exact local constants")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Working precision in bits for the numeric side.
    #[arg(long, global = true)]
    pub prec: Option<usize>,
    /// Largest group order that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    pub budget: u64,
    /// Directory for cached character tables.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ramification indices for every curve in a curve file.
    Ram(ram::RamArgs),
    /// Cusps of X_0(N) by level, with the Atkin-Lehner reduction of each level.
    Cusps {
        n: u64,
    },
    /// Character table and classification of irreducibles of a finite quotient.
    Gl2(exact::CaseArgs),
    /// Exact character sums T(xi, psi_u, psi'_lambda).
    Tsum(exact::TsumArgs),
    /// Exhaustive verification suites.
    Verify {
        #[command(subcommand)]
        suite: exact::Suite,
        /// Also write the JSON report to this path.
        #[arg(long, global = true)]
        artifact: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Bundled {
    /// Optimal curves of all isogeny classes with conductor at most 200.
    Le200,
    /// Larger conductors with a ramified cusp.
    Large,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<cuspram::Error> for Failure {
    fn from(e: cuspram::Error) -> Self {
        Failure {
            code: if e.is_invariant() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: format!("i/o error: {e}") }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

/// `Ok(true)` when every check passed.
pub type Outcome = Result<bool, Failure>;

fn run(cli: Cli) -> Outcome {
    if let Some(j) = cli.common.jobs {
        if j == 0 {
            return Err(Failure::usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    let c = &cli.common;
    match cli.command {
        Command::Ram(a) => ram::cmd_ram(&a, c),
        Command::Cusps { n } => exact::cmd_cusps(n, c),
        Command::Gl2(a) => exact::cmd_gl2(&a, c),
        Command::Tsum(a) => exact::cmd_tsum(&a, c),
        Command::Verify { suite, artifact } => exact::cmd_verify(&suite, artifact.as_deref(), c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_follow_the_subcommand() {
        let cli = Cli::try_parse_from(["cuspram", "cusps", "48", "--format", "json"]).unwrap();
        assert_eq!(cli.common.format, Format::Json);
    }

    #[test]
    fn error_codes() {
        let bad: Failure = cuspram::Error::InvalidInput("x".into()).into();
        assert_eq!(bad.code, 2);
        let math: Failure = cuspram::Error::Invariant("x".into()).into();
        assert_eq!(math.code, 1);
    }
}
