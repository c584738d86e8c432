use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morley_core::{BoundaryCondition, SolverKind};

#[derive(Debug, Parser)]
#[command(name = "morley", version, about = "Rectangular Morley elements for the biharmonic eigenvalue problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble and solve on one or more meshes, printing eigenvalues and residuals.
    Solve(SolveArgs),
    /// Reproduce one of the four published eigenvalue tables.
    Table(TableArgs),
    /// Convergence rates of one eigenvalue over a sequence of meshes.
    Rates(RatesArgs),
    /// Run verification suites on the element and its operators.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// dense, shift-invert or auto (dense up to 5000 free DOFs).
    #[arg(long, default_value = "auto", value_parser = parse_solver)]
    pub solver: SolverKind,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    /// Elements per axis; repeat for several meshes.
    #[arg(long = "n", required = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Vec<u64>,
    #[arg(long, value_parser = parse_bc)]
    pub bc: BoundaryCondition,
    /// Number of eigenpairs.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Table number, 1 to 4.
    #[arg(value_parser = clap::value_parser!(u32).range(1..=4))]
    pub which: u32,
    /// Override the published mesh sizes.
    #[arg(long = "n", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Vec<u64>,
    /// Also tabulate errors and rates against an extrapolated reference (not a published value).
    #[arg(long)]
    pub richardson: bool,
    /// Number of eigenvalues per mesh.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    #[arg(long, value_parser = parse_bc)]
    pub bc: BoundaryCondition,
    /// One-based eigenvalue index.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub index: u64,
    /// Mesh sizes; defaults to the published sequence.
    #[arg(long = "n", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Vec<u64>,
    /// Use an extrapolated reference instead of the exact eigenvalue (not a published value).
    #[arg(long)]
    pub richardson: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// bubbles, lemma2d, lemma3d, commuting, identity37, interpolation or all.
    #[arg(default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = morley_core::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Gauss points per axis for facet and volume quadrature of smooth functions.
    #[arg(long, default_value_t = morley_core::quadrature::DEFAULT_ORDER as u64, value_parser = clap::value_parser!(u64).range(2..=16))]
    pub quad_order: u64,
    #[command(flatten)]
    pub output: Output,
}

fn parse_bc(s: &str) -> Result<BoundaryCondition, String> {
    s.parse()
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse()
}
