use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qprod",
    version,
    about = "Complex-momentum spectra and regularized inner products of 1-D cut-off potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound, anti-bound and resonant momenta inside a rectangle.
    Spectrum(Common),
    /// Regularized inner product of two states.
    Product(ProductArgs),
    /// Tag matrix of all pairwise products of a list of states.
    Table(TableArgs),
    /// Momentum-plane map of the spectrum, optionally with a divergence wedge.
    Figure(FigureArgs),
    /// Gaussian-regularized half-line integral J(k, λ) and its limit.
    Regint(RegintArgs),
    /// Runs the numerical consistency checks and prints a report.
    Verify(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Potential description (JSON: mass and segments of width/height).
    #[arg(long, value_name = "FILE")]
    pub potential: PathBuf,

    #[arg(
        long,
        value_name = "RE_MIN,RE_MAX,IM_MIN,IM_MAX",
        default_value = "-10,10,-6,6",
        allow_hyphen_values = true,
        value_parser = parse_region
    )]
    pub region: [f64; 4],

    /// Restrict the search to one denominator family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Output file, written atomically. Standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Regularization parameters for numerical λ-sequences.
    #[arg(long, value_name = "L1,L2,...", value_delimiter = ',')]
    pub lambda_seq: Option<Vec<f64>>,

    /// Newton tolerance of the root refinement.
    #[arg(long, value_name = "X")]
    pub tol_root: Option<f64>,
}

/// State syntax: `bound:I`, `antibound:I`, `resonance:N`, `antiresonance:N`,
/// `incoming:N`, `scattering:P[:FAMILY]`, `background:RE,IM[:FAMILY]`.
#[derive(Debug, Args)]
pub struct ProductArgs {
    #[command(flatten)]
    pub common: Common,

    #[arg(value_name = "BRA")]
    pub bra: String,

    #[arg(value_name = "KET")]
    pub ket: String,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: Common,

    /// JSON file receiving the per-cell values, residuals and wedge data.
    #[arg(long, value_name = "FILE")]
    pub detail: Option<PathBuf>,

    /// States in row/column order. Default: every bound and anti-bound
    /// state, the first resonance, the second incoming resonance, one
    /// scattering and one background state.
    #[arg(value_name = "STATE")]
    pub states: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub common: Common,

    /// Draw the divergence wedge of this state.
    #[arg(long, value_name = "STATE")]
    pub wedge: Option<String>,
}

#[derive(Debug, Args)]
pub struct RegintArgs {
    /// Momentum as RE,IM; repeatable.
    #[arg(long, value_name = "RE,IM", required = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub k: Vec<[f64; 2]>,

    #[arg(long, value_name = "L1,L2,...", value_delimiter = ',')]
    pub lambda_seq: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}

fn parse_region(s: &str) -> Result<[f64; 4], String> {
    let v = parse_list(s)?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected 4 numbers, got {}", v.len()))
}

pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let v = parse_list(s)?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected RE,IM, got {} numbers", v.len()))
}
