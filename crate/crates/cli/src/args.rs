use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use icfp::denoise::Mode;
use icfp::Algorithm;

#[derive(Debug, Parser)]
#[command(name = "icfp", version, about = "Projection methods for implicit convex feasibility problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the Shepp–Logan phantom.
    Phantom(PhantomArgs),
    /// Add seeded Gaussian noise to an image.
    Noise(NoiseArgs),
    /// Denoise an image with interval constraints built from its neighbors.
    Denoise(DenoiseArgs),
    /// Compare a test image against a reference.
    Metrics(MetricsArgs),
    /// Run a solver on a small instance described in a text file.
    SolveToy(SolveToyArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: icfp::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: icfp::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// Width and height in pixels.
    #[arg(long, num_args = 2, value_names = ["W", "H"], default_values_t = [256, 256])]
    pub size: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub variance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Noisy input image.
    #[arg(long = "in", conflicts_with = "phantom", required_unless_present = "phantom")]
    pub input: Option<PathBuf>,
    /// Generate the noisy phantom in memory instead of reading a file. The
    /// clean phantom then serves as the SSIM reference.
    #[arg(long, num_args = 2, value_names = ["W", "H"])]
    pub phantom: Option<Vec<usize>>,
    /// Noise variance for `--phantom` [default: 0.1].
    #[arg(long, requires = "phantom")]
    pub variance: Option<f64>,
    /// Noise seed for `--phantom` [default: 0].
    #[arg(long, requires = "phantom")]
    pub noise_seed: Option<u64>,
    #[arg(long, default_value = "icfp", value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long, default_value = "simultaneous", value_parser = parse_algorithm)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Step size of the simultaneous method [default: 0.0625].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Block length of the steering steps of the sequential method
    /// [default: 100].
    #[arg(long)]
    pub beta: Option<usize>,
    /// Multiplier of the steering steps of the sequential method
    /// [default: 0.5].
    #[arg(long)]
    pub steering_scale: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Seed of the power iterations for the Lipschitz constant.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV trace [default: the output path with extension `csv`].
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub snapshot_stride: usize,
    /// Starting image [default: the noisy input].
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Reference image for SSIM.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveToyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value = "simultaneous", value_parser = parse_algorithm)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Step size of the simultaneous method [default: 1/L].
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long)]
    pub steering_scale: Option<f64>,
    /// Stop once a step moves less than this.
    #[arg(long, default_value_t = 0.0)]
    pub stop_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
