//! Command-line flags.

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisenberg_core::{NormKind, Variant};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "heisenberg", version, about = "Mixed-Hessian certification and oscillatory operator norms on Heisenberg-type groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the normalized mixed-Hessian determinant and certify non-degeneracy.
    Certify(RunArgs),
    /// Compare closed-form determinants with automatic differentiation.
    HessianCheck(HessianArgs),
    /// Sweep a² over [0, 2 C_β] and report the verdict at each step.
    ScanDegeneracy(ScanArgs),
    /// Measure operator-norm decay of discretized oscillatory operators.
    OpnormDecay(DecayArgs),
    /// Re-run the configuration stored in a JSON document.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// koranyi (rho1), minkowski (rho2), rho3 or rho0.
    #[arg(long, value_parser = parse_norm)]
    pub norm: Option<NormKind>,
    /// full or polarized.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// Points per axis of the reported grid.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub js: Vec<i32>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct HessianArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Case names, comma separated, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub case: Vec<String>,
    /// Test mode: shift β in the closed forms only. A nonzero shift should fail the check.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub perturb_beta: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Number of sweep intervals.
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    /// Localized group operator with phase `λ ρ(q⁻¹p)^{-β}`.
    Generic,
    /// Rescaled dyadic pieces `T̃_j`.
    Dyadic,
    /// One-dimensional `e^{iλxy}` sanity check.
    Euclidean,
}

#[derive(Args, Debug, Clone)]
pub struct DecayArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = DecayMode::Generic)]
    pub mode: DecayMode,
    /// Power-iteration cap per norm.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Allowed distance of the fitted slope from its prediction.
    #[arg(long)]
    pub slope_tol: Option<f64>,
    /// Allowed spread around the median in the uniform dyadic case.
    #[arg(long, default_value_t = 2.0)]
    pub factor: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    /// JSON document produced by an earlier run.
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn parse_norm(s: &str) -> Result<NormKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "koranyi" | "rho1" => Ok(NormKind::Rho1),
        "minkowski" | "rho2" => Ok(NormKind::Rho2),
        "rho3" => Ok(NormKind::Rho3),
        "rho0" | "max" => Ok(NormKind::Rho0),
        _ => Err(format!("unknown norm '{s}' (expected koranyi, minkowski, rho3 or rho0)")),
    }
}

pub fn parse_variant(s: &str) -> Result<Variant, String> {
    match s.to_ascii_lowercase().as_str() {
        "full" => Ok(Variant::Full),
        "polarized" | "pol" => Ok(Variant::Polarized),
        _ => Err(format!("unknown variant '{s}' (expected full or polarized)")),
    }
}
