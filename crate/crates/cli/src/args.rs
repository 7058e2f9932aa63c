use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coot_core::apps::Preset;
use coot_core::Loss;

#[derive(Debug, Parser)]
#[command(name = "cootkit", version, about = "Co-optimal transport between data matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Couple the samples and the features of two matrices.
    Coot(CootArgs),
    /// Gromov-Wasserstein between two point clouds or similarity matrices.
    Gw(GwArgs),
    /// Co-cluster the rows and columns of a matrix.
    Cocluster(CoclusterArgs),
    /// Propagate source labels to target samples through the sample coupling.
    Hda(HdaArgs),
    /// Isomorphism distance between two elections given as rank matrices.
    Election(ElectionArgs),
    /// Simulate a Gaussian block matrix with ground-truth co-clusters.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Sq,
    Abs,
    Kl,
}

impl From<LossArg> for Loss {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Sq => Loss::SquaredEuclidean,
            LossArg::Abs => Loss::Absolute,
            LossArg::Kl => Loss::KullbackLeibler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    D1,
    D2,
    D3,
    D4,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::D1 => Preset::D1,
            PresetArg::D2 => Preset::D2,
            PresetArg::D3 => Preset::D3,
            PresetArg::D4 => Preset::D4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GwInput {
    /// Rows are points; squared Euclidean distances are computed.
    Points,
    /// Inputs are symmetric similarity matrices.
    Similarity,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// BCD iteration limit.
    #[arg(long, default_value_t = coot_core::coot::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Stop when the coupling moves less than this (Frobenius norm).
    #[arg(long, default_value_t = coot_core::coot::DEFAULT_TOL)]
    pub tol: f64,
    /// Threads used to evaluate restarts.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Exit with status 0 even if the iteration limit was reached.
    #[arg(long)]
    pub allow_maxiter: bool,
}

#[derive(Debug, Args)]
pub struct CootArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, value_enum, default_value_t = LossArg::Sq)]
    pub loss: LossArg,
    /// Entropic regularization of the sample coupling (0 = exact).
    #[arg(long, default_value_t = 0.0)]
    pub eps1: f64,
    /// Entropic regularization of the feature coupling (0 = exact).
    #[arg(long, default_value_t = 0.0)]
    pub eps2: f64,
    /// Sample weights of X (single-column CSV, normalized on read).
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[arg(long)]
    pub w2: Option<PathBuf>,
    /// Feature weights of X.
    #[arg(long)]
    pub v: Option<PathBuf>,
    #[arg(long)]
    pub v2: Option<PathBuf>,
    /// Feature weights proportional to column means (overridden by --v/--v2).
    #[arg(long)]
    pub column_mean_weights: bool,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write PGM heatmaps of the couplings.
    #[arg(long)]
    pub heatmaps: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GwArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, value_enum, default_value_t = GwInput::Points)]
    pub input: GwInput,
    #[arg(long, value_enum, default_value_t = LossArg::Sq)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long)]
    pub w: Option<PathBuf>,
    #[arg(long)]
    pub w2: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub heatmaps: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoclusterArgs {
    #[arg(long)]
    pub x: PathBuf,
    /// Row clusters.
    #[arg(short = 'g', long)]
    pub row_clusters: usize,
    /// Column clusters.
    #[arg(short = 'm', long)]
    pub col_clusters: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps2: f64,
    /// Summary-matrix updates.
    #[arg(long, default_value_t = 10)]
    pub outer_iter: usize,
    /// Directory holding true_rows.csv and true_cols.csv; adds the CCE to the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub heatmaps: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HdaArgs {
    #[arg(long)]
    pub xs: PathBuf,
    #[arg(long)]
    pub xt: PathBuf,
    /// Source labels, one integer per line.
    #[arg(long)]
    pub ys: PathBuf,
    /// Known target labels, -1 for unlabeled.
    #[arg(long)]
    pub yt_partial: Option<PathBuf>,
    /// Mask penalty: "auto" or a positive number.
    #[arg(long, default_value = "auto")]
    pub penalty: String,
    #[arg(long, value_enum, default_value_t = LossArg::Sq)]
    pub loss: LossArg,
    #[arg(long, default_value_t = 0.0)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eps2: f64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub heatmaps: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ElectionArgs {
    /// Rank matrix: row i holds the 1-based positions voter i gives each candidate.
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for the couplings and the report; nothing is written without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub preset: Option<PresetArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(short = 'g', long)]
    pub row_clusters: Option<usize>,
    #[arg(short = 'm', long)]
    pub col_clusters: Option<usize>,
    /// Spacing between block means.
    #[arg(long)]
    pub separation: Option<f64>,
    /// Cluster sizes proportional to 1, 2, ..., k instead of equal.
    #[arg(long)]
    pub unequal: bool,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
