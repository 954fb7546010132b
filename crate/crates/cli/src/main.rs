//! `dickman-lab`: run the generalized Mertens experiments from the shell.
//!
//! Exit status is 0 on success, 1 on a usage or domain error and 2 when a
//! subcommand with a pass/fail band produced a result outside it.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dickman_lab::dickman::{DEFAULT_STEP, DEFAULT_X_MAX};

use config::{parse_count, parse_real, SubsetArg};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "dickman-lab", version, about = "Generalized Mertens formulas, checked by computation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count the primes of a subset below each N.
    Primes(PrimesArgs),
    /// The generalized Dickman function and distribution.
    #[command(subcommand)]
    Dickman(DickmanCommand),
    /// Restricted Mertens ratio tables.
    #[command(subcommand)]
    Mertens(MertensCommand),
    /// Exact totient identity over a finite prime set.
    Identity(IdentityArgs),
    /// Totient-weighted harmonic sums over log N.
    PhiRatio(PhiRatioArgs),
    /// Fit the (log N)^(1/phi(l)) exponent of a residue-class Euler product.
    Williams(WilliamsArgs),
    /// Draw normalized logs of a random-integer model.
    Sample(SampleArgs),
    /// Kolmogorov-Smirnov distance of normalized logs to D_theta/theta.
    Ks(KsArgs),
}

#[derive(Debug, Subcommand)]
enum DickmanCommand {
    /// Tabulate rho, the density and the CDF on a grid.
    Table(DickmanTableArgs),
    /// Print e^(gamma theta) Gamma(theta + 1).
    Constant(DickmanConstantArgs),
}

#[derive(Debug, Subcommand)]
enum MertensCommand {
    /// One ratio row per N.
    Ratio(RatioArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SubsetArgs {
    /// all, residue:L:J or file:PATH.
    #[arg(long, default_value = "all")]
    subset: SubsetArg,
    /// Declared density, required for file subsets.
    #[arg(long, value_parser = parse_real)]
    theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExactArg {
    Auto,
    On,
    Off,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Random seed; falls back to DICKMAN_LAB_SEED, then to 1729.
    #[arg(long, env = "DICKMAN_LAB_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct PrimesArgs {
    #[command(flatten)]
    subset: SubsetArgs,
    /// Comma-separated bounds N.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_count)]
    n: Vec<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DickmanTableArgs {
    #[arg(long, default_value_t = 1.0, value_parser = parse_real)]
    theta: f64,
    /// Grid step; 1/h must be an integer.
    #[arg(long, default_value_t = DEFAULT_STEP, value_parser = parse_real)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_X_MAX, value_parser = parse_real)]
    xmax: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DickmanConstantArgs {
    /// Comma-separated densities in (0, 1].
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = parse_real)]
    theta: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Sums over all subset-supported n.
    Thm1i,
    /// Sums over k-free n.
    Thm1ii,
    /// Euler product over the totient-weighted k-free sum.
    Thm3,
    /// All primes, Euler product over the harmonic number.
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CutArg {
    /// Denominator over n <= N.
    N,
    /// Denominator over n <= the largest subset prime <= N.
    LargestPrime,
}

#[derive(Debug, Args)]
struct RatioArgs {
    #[command(flatten)]
    subset: SubsetArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Thm1i)]
    variant: VariantArg,
    /// Required by thm1ii and thm3.
    #[arg(long)]
    k: Option<u32>,
    /// Comma-separated increasing bounds N.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_count)]
    n: Vec<u64>,
    #[arg(long, value_enum, default_value_t = CutArg::N)]
    cut: CutArg,
    #[arg(long, value_enum, default_value_t = ExactArg::Auto)]
    exact: ExactArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct IdentityArgs {
    /// Explicit comma-separated primes.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, conflicts_with_all = ["subset", "bound"])]
    primes: Option<Vec<u64>>,
    /// Use the first --n primes of this subset.
    #[arg(long, requires = "n", conflicts_with = "bound")]
    subset: Option<SubsetArg>,
    /// Number of primes taken from --subset.
    #[arg(long, value_parser = parse_count)]
    n: Option<u64>,
    /// Use every prime <= this bound and also report the asymptotic leg.
    #[arg(long, value_parser = parse_count)]
    bound: Option<u64>,
    #[arg(long)]
    k: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PhiRatioArgs {
    /// Comma-separated bounds N (each at least 10).
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_count)]
    n: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Sum 1/phi(n) over all n <= N, target zeta(2)zeta(3)/zeta(6).
    #[arg(long)]
    companion: bool,
    #[arg(long, value_enum, default_value_t = ExactArg::Auto)]
    exact: ExactArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct WilliamsArgs {
    /// residue:L:J, or all for l = 1.
    #[arg(long)]
    subset: SubsetArg,
    /// Comma-separated bounds N spanning at least two decades.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_count)]
    n: Vec<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[command(flatten)]
    subset: SubsetArgs,
    /// Number of primes N in the model.
    #[arg(long, value_parser = parse_count)]
    n: u64,
    /// 1 geometric, 2 conditioned below k, 3 truncated at k - 1.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    model: u8,
    /// Required by models 2 and 3.
    #[arg(long)]
    k: Option<u32>,
    #[command(flatten)]
    seed: SeedArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1000, value_parser = parse_count)]
    samples: u64,
    /// Draw sum_j B_j X_j instead of the exponent vector.
    #[arg(long)]
    bx: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct KsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10_000, value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_STEP, value_parser = parse_real)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_X_MAX, value_parser = parse_real)]
    xmax: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(commands::Status::Pass) => ExitCode::SUCCESS,
        Ok(commands::Status::Fail(reason)) => {
            eprintln!("check failed: {reason}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
