use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "phasefront", version, about = "Order-to-chaos landscapes of deep random networks")]
pub struct Cli {
    /// Flat `key = value` file (or a run manifest) supplying flag defaults
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads (default: PHASEFRONT_THREADS, else all cores)
    #[arg(long, global = true, env = "PHASEFRONT_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergence landscape over a (σ_w, σ_b) region
    Sweep(SweepArgs),
    /// Re-sweep a sub-region of an existing landscape at full resolution
    Zoom(ZoomArgs),
    /// Independent vs perturbed input divergence at several depths
    Tradeoff(TradeoffArgs),
    /// Mean-field fixed points and asymptotic divergence over a grid
    Meanfield(MeanfieldArgs),
    /// Mean-field level set L* = τ, one σ_w crossing per σ_b
    Boundary(BoundaryArgs),
    /// Box-counting dimension of a landscape's frontier
    Fracdim(FracdimArgs),
    /// Grayscale PGM image of a landscape
    Render(RenderArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sweep(_) => "sweep",
            Command::Zoom(_) => "zoom",
            Command::Tradeoff(_) => "tradeoff",
            Command::Meanfield(_) => "meanfield",
            Command::Boundary(_) => "boundary",
            Command::Fracdim(_) => "fracdim",
            Command::Render(_) => "render",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NetworkArgs {
    #[arg(long, default_value = "mlp", value_parser = ["mlp", "conv", "fdf", "fdfd"])]
    pub topology: String,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    /// Convolution kernel size (conv only; defaults to the width)
    #[arg(long)]
    pub kernel: Option<usize>,
    #[arg(long, default_value = "erf", value_parser = ["erf", "tanh"])]
    pub activation: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sw_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub sw_max: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sb_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub sb_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 1000)]
    pub depth: usize,
    #[arg(long, default_value_t = 20)]
    pub avg_last: usize,
    /// Samples per axis
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    /// σ_w samples, overriding --res
    #[arg(long)]
    pub res_sw: Option<usize>,
    /// σ_b samples, overriding --res
    #[arg(long)]
    pub res_sb: Option<usize>,
    /// Relative perturbation of the second input, or `off` for independent inputs
    #[arg(long, default_value = "off")]
    pub perturb: String,
    #[arg(long, default_value = "2G")]
    pub mem_budget: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZoomArgs {
    #[arg(long)]
    pub parent: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub sw_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sw_max: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sb_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sb_max: f64,
    /// Samples per axis (default: the parent's)
    #[arg(long)]
    pub res: Option<usize>,
    #[arg(long, default_value = "2G")]
    pub mem_budget: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TradeoffArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub network: NetworkArgs,
    #[arg(long, default_value_t = 1.0)]
    pub sb: f64,
    /// Comma-separated σ_w values
    #[arg(long, default_value = "0.5,1,1.5,2,2.5,3")]
    pub sw_list: String,
    /// Comma-separated depths
    #[arg(long, default_value = "10,100,1000")]
    pub depths: String,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    #[arg(long, default_value = "2G")]
    pub mem_budget: String,
    /// CSV output
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value = "erf", value_parser = ["erf", "tanh"])]
    pub activation: String,
    /// Quadrature order
    #[arg(long, default_value_t = 128)]
    pub order: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeanfieldArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 32)]
    pub res: usize,
    /// CSV output
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundaryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 0.01)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sw_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub sw_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sb_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub sb_max: f64,
    /// Number of σ_b rows
    #[arg(long, default_value_t = 61)]
    pub sb_count: usize,
    /// Bisection tolerance on σ_w
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// CSV output
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FracdimArgs {
    #[arg(long)]
    pub grid: PathBuf,
    /// Number of quantile thresholds, or a comma-separated list of values
    #[arg(long, default_value = "64")]
    pub thresholds: String,
    #[arg(long)]
    pub jmin: Option<u32>,
    #[arg(long)]
    pub jmax: Option<u32>,
    /// JSON report
    #[arg(long)]
    pub out: PathBuf,
    /// CSV of (τ, j, ln N_j) for plotting
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RenderArgs {
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long, default_value = "linear", value_parser = ["linear", "log1p"])]
    pub scale: String,
    #[arg(long)]
    pub out: PathBuf,
}
