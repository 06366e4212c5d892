//! Command-line driver: verification reports over the catalog, chain
//! spectra and symmetry, and the root-of-unity module.

pub mod chain_cmd;
pub mod output;
pub mod rou;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddgl2::expr::{self, Env};
use ddgl2::numerics::{Tolerance, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "DDGL2_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "ddgl2", version, about = "Dipper-Donkin GL2 inner actions on the Dirac algebra: checks, chains, spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check relations, determinant, algebra dimensions, patterns and
    /// coefficients for catalog rows.
    Verify(VerifyArgs),
    /// Build a chain Hamiltonian and report symmetry and spectrum.
    Chain(ChainArgs),
    /// Check the cyclic module at a primitive p-th root of unity.
    Rou(RouArgs),
    /// Export the catalog as JSON.
    Catalog(CommonOut),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct CommonOut {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; defaults to $DDGL2_OUT_DIR/<name> or stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub residual_abs: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rank_rel: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub cluster_rel: f64,
}

impl TolArgs {
    pub fn tolerance(&self) -> Result<Tolerance, String> {
        let t = Tolerance {
            residual_abs: self.residual_abs,
            rank_rel: self.rank_rel,
            cluster_rel: self.cluster_rel,
        };
        t.validate().map_err(|e| e.to_string())?;
        Ok(t)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Catalog row, repeatable.
    #[arg(long = "case")]
    pub cases: Vec<String>,
    #[arg(long, conflicts_with = "cases")]
    pub all: bool,
    /// Deformation parameter, any scalar expression such as `2` or `exp(2*pi*i/7)`.
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Known-discrepancies file replacing the built-in one.
    #[arg(long)]
    pub known: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: CommonOut,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[arg(long = "case")]
    pub case: String,
    /// Number of sites.
    #[arg(long = "L", short = 'L', default_value_t = 2)]
    pub sites: usize,
    /// Bond coefficients `A,B,C`; defaults to the catalog triple.
    #[arg(long)]
    pub coeff: Option<String>,
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Cap on the chain dimension n^L.
    #[arg(long, default_value_t = ddgl2::chain::DEFAULT_MAX_DIM)]
    pub max_dim: usize,
    /// Write the nonzero Hamiltonian entries as CSV.
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
    /// Write the eigenvalues as CSV.
    #[arg(long)]
    pub dump_spectrum: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: CommonOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Corrected,
    AsPrinted,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct RouArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub p: u32,
    #[arg(long, value_enum, default_value = "both")]
    pub variant: VariantArg,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, default_value = "1")]
    pub beta: String,
    #[arg(long, default_value = "1")]
    pub eta: String,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: CommonOut,
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAIL,
            message: message.into(),
        }
    }
}

pub fn parse_scalar(src: &str) -> Result<C64, Failure> {
    let z = expr::eval_scalar(src, &Env::new(1)).map_err(|e| Failure::usage(format!("bad scalar '{src}': {e}")))?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Failure::usage(format!("scalar '{src}' is not finite")));
    }
    Ok(z)
}

pub fn parse_triple(src: &str) -> Result<[C64; 3], Failure> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("expected A,B,C, got '{src}'")));
    }
    Ok([parse_scalar(parts[0])?, parse_scalar(parts[1])?, parse_scalar(parts[2])?])
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Chain(a) => chain_cmd::run(a),
        Command::Rou(a) => rou::run(a),
        Command::Catalog(a) => output::catalog(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
