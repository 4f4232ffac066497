//! Forecast-quality metrics, the simulation study and the rolling backtest.

mod backtest;
mod metrics;
mod study;

pub use backtest::{
    run_backtest, BacktestConfig, BacktestReport, BacktestSummary, DimensionForecast, WindowRecord,
    WindowStatus,
};
pub use metrics::{fbm_hit_ratio, hit_ratio, lp_residual_norm, HitRatio, LpErrorQuery};
pub use study::{cartesian_grid, run_simulation_study, StudyConfig, StudyRow, StudyTable};
