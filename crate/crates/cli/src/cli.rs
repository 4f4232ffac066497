use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::io::Format;

#[derive(Debug, Parser)]
#[command(name = "lfsm", version, about = "Linear fractional stable motion: simulate, estimate, decompose, forecast")]
pub struct Cli {
    /// TOML file of defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `reproduce`); standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel commands; 0 uses every core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an LFSM path by Riemann sums.
    Simulate(SimulateArgs),
    /// Estimate alpha, H and sigma from a series.
    Estimate(EstimateArgs),
    /// Solve the triangular decomposition coefficients.
    Decompose(DecomposeArgs),
    /// Scan where the decomposition exists over an (alpha, H) grid.
    Frontier(FrontierArgs),
    /// Forecast the value following a series.
    Forecast(ForecastArgs),
    /// Hit ratios on simulated paths over an (alpha, H) grid.
    Study(StudyArgs),
    /// Rolling estimation and forecasting on a series.
    Backtest(BacktestArgs),
    /// Run the checked-in frontier and hit-ratio scans.
    Reproduce,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// CSV with `timestamp,value` columns, or a single value column.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Time step; required for single-column input.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct EstimationArgs {
    /// Reference lag in time units; defaults to the series time step.
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Grid of theta values, `a,b,c` or `start:stop:step`.
    #[arg(long, value_name = "GRID")]
    pub theta_grid: Option<String>,
    /// Lags in time units for the H regression; defaults to tau0 x {1,2,4,8,16}.
    #[arg(long, value_name = "GRID")]
    pub tau_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Length of the past kept in the kernel integral.
    #[arg(long)]
    pub truncation: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Keep every n-th simulated point.
    #[arg(long)]
    pub every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimation: EstimationArgs,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Base time of the decomposition.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Coefficient solver: auto, closed_form, gaussian or newton.
    #[arg(long)]
    pub solver: Option<String>,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    #[arg(long, value_name = "GRID")]
    pub alpha_grid: Option<String>,
    #[arg(long, value_name = "GRID")]
    pub hurst_grid: Option<String>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub d: Option<String>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Parameters; any that are missing are estimated from the input.
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub d: Option<String>,
    #[command(flatten)]
    pub estimation: EstimationArgs,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long, value_name = "GRID")]
    pub alpha_grid: Option<String>,
    #[arg(long, value_name = "GRID")]
    pub hurst_grid: Option<String>,
    /// Forecast dimensions, e.g. `2,5,20`.
    #[arg(long)]
    pub d: Option<String>,
    /// Observations per simulated path.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation time step.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Time between observations.
    #[arg(long)]
    pub spacing: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Observations per estimation window.
    #[arg(long)]
    pub window: Option<usize>,
    /// Forecast dimensions, e.g. `2:12`.
    #[arg(long)]
    pub d: Option<String>,
    /// Spacing in samples of the forecasting grid.
    #[arg(long)]
    pub step: Option<usize>,
    /// Samples between consecutive window ends.
    #[arg(long)]
    pub stride: Option<usize>,
    #[command(flatten)]
    pub estimation: EstimationArgs,
}
