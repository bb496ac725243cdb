use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Construct, verify, search and analyze perfect periodic sequences and
/// AOP arrays.
#[derive(Parser, Debug)]
#[command(name = "perfseq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a classical perfect object and write it as a sequence file.
    Construct(ConstructArgs),
    /// Check perfection / AOP / quaternion perfection of a file.
    Verify(VerifyArgs),
    /// Exhaustive sweep over an index-function or raw alphabet space.
    Search(SearchArgs),
    /// Gaussian x fractional traces for a floored bi-quadratic spec.
    Scatter(ScatterArgs),
    /// How often orthogonality beyond K columns needs the fractional factor.
    Survey(SurveyArgs),
    /// Column-sum or row-sum projection of an array file.
    Project(ProjectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConstructFamily {
    Frank,
    Chu,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConventionArg {
    Right,
    Left,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AxisArg {
    /// r_i = sum over the columns of row i (length R).
    Cols,
    /// c_j = sum over the rows of column j (length C).
    Rows,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub family: ConstructFamily,
    /// Frank order or Chu length.
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub path: PathBuf,
    /// Fold the flattened sequence with this many columns and check AOP.
    #[arg(long)]
    pub divisor: Option<usize>,
    #[arg(long, value_enum, default_value = "right")]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value = "poly")]
    pub family: perfseq::Family,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub deg_x: u32,
    #[arg(long, default_value_t = 2)]
    pub deg_y: u32,
    #[arg(long, default_value_t = 1)]
    pub min_r: usize,
    #[arg(long, default_value_t = 8)]
    pub max_r: usize,
    #[arg(long, default_value_t = 1)]
    pub min_c: usize,
    #[arg(long, default_value_t = 8)]
    pub max_c: usize,
    /// Sequence length for the raw families.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = perfseq::search::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Seeds the pruned-candidate spot check sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `float` additionally tallies exact-versus-float zero agreement.
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long)]
    pub symmetry: bool,
    /// Floored only: restrict to A(j) ≡ 0 (mod n).
    #[arg(long)]
    pub collapse_constrained: bool,
    /// `i/m`: keep primary indices congruent to i mod m.
    #[arg(long)]
    pub shard: Option<String>,
    #[arg(long)]
    pub hit_limit: Option<usize>,
    /// Seconds between progress lines on stderr; 0 disables.
    #[arg(long, default_value_t = 0.0)]
    pub progress: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScatterArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Per-column x² coefficients, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub a: Vec<i64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub b: Vec<i64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub c: Vec<i64>,
    /// Defaults to nK.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub shift: usize,
    /// Directory for the per-pair CSV files.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SurveyArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = perfseq::search::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "cols")]
    pub axis: AxisArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => commands::construct(a),
        Command::Verify(a) => commands::verify(a),
        Command::Search(a) => commands::search(a),
        Command::Scatter(a) => commands::scatter(a),
        Command::Survey(a) => commands::survey(a),
        Command::Project(a) => commands::project(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("perfseq: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
