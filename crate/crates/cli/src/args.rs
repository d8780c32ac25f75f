use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "featcov", version, about = "Key-point coverage analysis and GA-based refinement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Debug, Subcommand)]
pub enum Commands {
    /// K-function profile and coverage alpha of a key-point file
    Coverage(CoverageArgs),
    /// Refine a key-point file with the genetic algorithm
    Select(SelectArgs),
    /// Compare homographies from the full and refined key-point sets
    Evaluate(EvaluateArgs),
    /// t-test and McNemar reports over an evaluation CSV
    Stats(StatsArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Rerun from a manifest written by a previous run; other inputs are ignored
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct RegionArgs {
    /// Study region as WIDTHxHEIGHT in pixels
    #[arg(long, value_name = "WxH")]
    pub region: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct MetricArgs {
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub dr: Option<f64>,
    #[arg(long, value_enum, default_value_t = CorrectionArg::Isotropic)]
    pub correction: CorrectionArg,
    #[arg(long, value_enum, default_value_t = PoissonScaleArg::Unit)]
    pub poisson_scale: PoissonScaleArg,
    /// Merge key-points with identical coordinates before analysis
    #[arg(long)]
    pub dedup: bool,
}

#[derive(Debug, Args, Clone)]
pub struct GaArgs {
    #[arg(long, default_value_t = 20)]
    pub generations: usize,
    #[arg(long, default_value_t = 100)]
    pub pop_max: usize,
    #[arg(long, default_value_t = 10)]
    pub pop_init: usize,
    #[arg(long, default_value_t = 0.030)]
    pub mutation_rate: f64,
    #[arg(long, value_enum, default_value_t = MutationUnitArg::Gene)]
    pub mutation_unit: MutationUnitArg,
    #[arg(long, default_value_t = 10)]
    pub crossovers: usize,
    #[arg(long)]
    pub no_elitism: bool,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    pub keypoints: Option<PathBuf>,
    #[command(flatten)]
    pub region: RegionArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    pub keypoints: Option<PathBuf>,
    #[command(flatten)]
    pub region: RegionArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Tile grid for the before/after counts, as NXxNY
    #[arg(long, default_value = "4x4")]
    pub grid: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub image1: Option<PathBuf>,
    pub image2: Option<PathBuf>,
    /// Correspondence CSV (x1,y1,x2,y2)
    pub correspondences: Option<PathBuf>,
    /// Ground-truth homography; correspondences are synthesised from it
    #[arg(long, value_name = "H.txt", conflicts_with = "correspondences")]
    pub synthetic: Option<PathBuf>,
    /// Batch file with columns id,image1,image2,correspondences,homography
    #[arg(long, value_name = "FILE", conflicts_with_all = ["image1", "image2", "correspondences", "synthetic"])]
    pub pairs: Option<PathBuf>,
    /// Identifier for a single pair
    #[arg(long, default_value = "pair")]
    pub id: String,
    /// Image-1 key-points for synthetic mode (generated when omitted)
    #[arg(long)]
    pub keypoints: Option<PathBuf>,
    /// Number of generated key-points in synthetic mode
    #[arg(long, default_value_t = 100)]
    pub synthetic_points: usize,
    /// Gaussian noise (pixels) added to synthesised correspondences
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Fraction of synthesised correspondences replaced by outliers
    #[arg(long, default_value_t = 0.0)]
    pub outliers: f64,
    /// Pixels of d3 above this value count as misaligned
    #[arg(long, default_value_t = 0)]
    pub threshold: u8,
    /// Estimate with RANSAC using this inlier threshold in pixels
    #[arg(long, value_name = "PX")]
    pub ransac: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub ransac_iters: usize,
    #[arg(long, value_enum, default_value_t = InterpolationArg::Bilinear)]
    pub interpolation: InterpolationArg,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub ga: GaArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub results: Option<PathBuf>,
    /// Input rows are summaries: metric,mean_original,sd_original,n_original,mean_refined,sd_refined,n_refined
    #[arg(long)]
    pub summary: bool,
    /// Paired differences within this margin count as ties for McNemar
    #[arg(long, default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Use Welch's unequal-variance test
    #[arg(long)]
    pub welch: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionArg {
    None,
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoissonScaleArg {
    Unit,
    Intensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationUnitArg {
    Gene,
    Chromosome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationArg {
    Bilinear,
    Nearest,
}
