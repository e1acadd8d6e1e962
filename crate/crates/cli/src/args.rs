use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ftswilcox", version, about = "Depth-based two-sample tests and change detection for functional data")]
pub struct Cli {
    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, env = "FTS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Depth of every curve of a sample.
    Depth(DepthArgs),
    /// Local Wilcoxon test of two samples.
    Test(TestArgs),
    /// Moving-window change detection against a reference sample.
    Detect(DetectArgs),
    /// Draw a sample from one of the built-in models.
    Simulate(SimulateArgs),
    /// Functional boxplot summary.
    Boxplot(BoxplotArgs),
    /// Fourier least-squares smoothing.
    Smooth(SmoothArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DepthArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Use the local depth at level `beta`.
    #[arg(long)]
    pub local: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum SchemeArg {
    #[value(name = "eq4-max")]
    #[serde(rename = "eq4-max")]
    Eq4Max,
    #[value(name = "mid-rank")]
    #[serde(rename = "mid-rank")]
    MidRank,
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    #[arg(long)]
    pub first: PathBuf,
    #[arg(long)]
    pub second: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "eq4-max")]
    pub scheme: SchemeArg,
    /// Number of bootstrap replicates.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub stream: PathBuf,
    #[arg(long, default_value_t = 40)]
    pub window: usize,
    #[arg(long, default_value_t = 10)]
    pub step: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub consec: usize,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trace CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Change report JSON; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Wiener,
    Bridge,
    Far1,
    Mixture,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorArg {
    Wiener,
    Bridge,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    /// `120`, `1440`, or a file of grid points.
    #[arg(long, default_value = "120")]
    pub grid: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// FAR(1): norm of the Gaussian kernel.
    #[arg(long, default_value_t = 0.5, conflicts_with = "kernel_constant")]
    pub kernel_norm: f64,
    /// FAR(1): use a constant kernel with this value instead.
    #[arg(long)]
    pub kernel_constant: Option<f64>,
    /// FAR(1): innovation process.
    #[arg(long, value_enum, default_value = "wiener")]
    pub error: ErrorArg,
    #[arg(long, default_value_t = 50)]
    pub burn_in: usize,
    /// Mixture: share of shifted curves.
    #[arg(long, default_value_t = 0.05)]
    pub contamination: f64,
    /// Mixture: vertical shift of the second component.
    #[arg(long, default_value_t = 2.0)]
    pub shift: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoxplotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub central: f64,
    /// Fence width in central-envelope widths; `inf` disables outliers.
    #[arg(long, default_value_t = 1.5)]
    pub factor: f64,
    /// Envelope CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SmoothArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub nbasis: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
