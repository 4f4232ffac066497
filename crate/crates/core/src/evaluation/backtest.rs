use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{solve_coefficients, DEFAULT_TOL};
use crate::error::{LfsmError, Result};
use crate::estimation::{estimate, EstimationConfig, EstimationResult};
use crate::forecast::predict_with_coeffs;
use crate::model::TimeSeries;

use super::metrics::{hit_ratio, HitRatio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    /// Observations per estimation window.
    pub window_len: usize,
    pub d_set: Vec<usize>,
    /// Spacing, in samples, of the forecasting grid.
    pub step: usize,
    /// Estimation lags; `None` uses `τ0 = dt`.
    pub estimation: Option<EstimationConfig>,
    /// Distance, in samples, between consecutive window ends.
    pub stride: usize,
}

impl BacktestConfig {
    pub fn new(window_len: usize, d_set: Vec<usize>) -> Self {
        Self {
            window_len,
            d_set,
            step: 1,
            estimation: None,
            stride: 1,
        }
    }

    pub fn validate(&self, series: &TimeSeries) -> Result<()> {
        if self.d_set.is_empty() || self.d_set.iter().any(|&d| d < 2) {
            return Err(LfsmError::invalid("backtest dimensions must be >= 2"));
        }
        if self.step == 0 || self.stride == 0 {
            return Err(LfsmError::invalid("step and stride must be >= 1"));
        }
        let max_d = *self.d_set.iter().max().unwrap_or(&2);
        if (max_d - 1) * self.step >= self.window_len {
            return Err(LfsmError::invalid(format!(
                "window of {} samples cannot hold {max_d} points spaced by {}",
                self.window_len, self.step
            )));
        }
        if series.len() <= self.window_len + self.step {
            return Err(LfsmError::invalid(format!(
                "series of {} samples is too short for a window of {} and step {}",
                series.len(),
                self.window_len,
                self.step
            )));
        }
        self.estimation_config(series.dt()).validate(series.dt())
    }

    fn estimation_config(&self, dt: f64) -> EstimationConfig {
        self.estimation.clone().unwrap_or_else(|| EstimationConfig::new(dt))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowStatus {
    Ok,
    EstimationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionForecast {
    pub d: usize,
    /// +1, -1, or 0 for no signal; `None` when the forecast failed.
    pub sign: Option<f64>,
    pub predicted_increment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRecord {
    /// Index of the last observation of the window.
    pub end: usize,
    pub time: f64,
    pub status: WindowStatus,
    pub alpha_hat: Option<f64>,
    pub h_hat: Option<f64>,
    pub sigma_hat: Option<f64>,
    pub realized_increment: f64,
    pub forecasts: Vec<DimensionForecast>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestSummary {
    pub d: usize,
    /// Ties excluded; `None` when no forecast carried a sign.
    pub hit_ratio: Option<f64>,
    pub matches: usize,
    pub n_forecasts: usize,
    pub n_no_signal: usize,
    pub n_zero_realized: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub windows: Vec<WindowRecord>,
    pub summaries: Vec<BacktestSummary>,
    pub n_estimation_failures: usize,
}

impl BacktestReport {
    pub fn summary(&self, d: usize) -> Option<&BacktestSummary> {
        self.summaries.iter().find(|s| s.d == d)
    }

    /// Every window failed estimation.
    pub fn total_failure(&self) -> bool {
        !self.windows.is_empty() && self.n_estimation_failures == self.windows.len()
    }
}

/// Rolling estimation and one-step sign forecasting. For each window ending
/// at `e`, the parameters are estimated on the `window_len` samples up to `e`
/// and the increment `X_{e+step} - X_e` is forecast from the `d` values
/// `X_{e-(d-1) step}, ..., X_e`.
pub fn run_backtest(series: &TimeSeries, cfg: &BacktestConfig) -> Result<BacktestReport> {
    cfg.validate(series)?;
    let est_cfg = cfg.estimation_config(series.dt());
    let values = series.values();
    let ends: Vec<usize> = (cfg.window_len - 1..values.len() - cfg.step)
        .step_by(cfg.stride)
        .collect();

    let windows: Vec<WindowRecord> = ends
        .par_iter()
        .map(|&end| evaluate_window(series, cfg, &est_cfg, end))
        .collect();

    let n_estimation_failures = windows
        .iter()
        .filter(|w| w.status == WindowStatus::EstimationFailed)
        .count();
    let summaries = cfg
        .d_set
        .iter()
        .enumerate()
        .map(|(k, &d)| summarize(&windows, k, d))
        .collect();
    Ok(BacktestReport {
        windows,
        summaries,
        n_estimation_failures,
    })
}

fn evaluate_window(
    series: &TimeSeries,
    cfg: &BacktestConfig,
    est_cfg: &EstimationConfig,
    end: usize,
) -> WindowRecord {
    let values = series.values();
    let realized = values[end + cfg.step] - values[end];
    let mut record = WindowRecord {
        end,
        time: series.time(end),
        status: WindowStatus::EstimationFailed,
        alpha_hat: None,
        h_hat: None,
        sigma_hat: None,
        realized_increment: realized,
        forecasts: cfg
            .d_set
            .iter()
            .map(|&d| DimensionForecast { d, sign: None, predicted_increment: None })
            .collect(),
    };
    let est = series
        .slice(end + 1 - cfg.window_len, end + 1)
        .and_then(|w| estimate(&w, est_cfg));
    let Ok(est) = est else {
        return record;
    };
    record.status = WindowStatus::Ok;
    record.alpha_hat = Some(est.alpha_hat);
    record.h_hat = Some(est.h_hat);
    record.sigma_hat = est.sigma_hat;
    for slot in record.forecasts.iter_mut() {
        if let Ok(inc) = forecast_increment(values, end, cfg.step, slot.d, &est) {
            slot.sign = Some(inc.0);
            slot.predicted_increment = Some(inc.1);
        }
    }
    record
}

/// Signs do not depend on the scale, so a missing `σ̂` falls back to 1.
fn forecast_increment(
    values: &[f64],
    end: usize,
    step: usize,
    d: usize,
    est: &EstimationResult,
) -> Result<(f64, f64)> {
    let (coeffs, _) = solve_coefficients(est.alpha_hat, est.h_hat, 1, d, DEFAULT_TOL)?;
    let window: Vec<f64> = (0..d).map(|k| values[end - (d - 1 - k) * step]).collect();
    let f = predict_with_coeffs(&window, &coeffs, est.sigma_hat.unwrap_or(1.0))?;
    Ok((f.direction().unwrap_or(0.0), f.predicted_increment))
}

fn summarize(windows: &[WindowRecord], k: usize, d: usize) -> BacktestSummary {
    let mut predicted = Vec::new();
    let mut realized = Vec::new();
    let mut n_failed = 0;
    for w in windows {
        match w.forecasts[k].sign {
            Some(s) => {
                predicted.push(s);
                realized.push(w.realized_increment);
            }
            None => n_failed += 1,
        }
    }
    let h: Option<HitRatio> = hit_ratio(&predicted, &realized).ok();
    BacktestSummary {
        d,
        hit_ratio: h.map(|h| h.ratio),
        matches: h.map_or(0, |h| h.matches),
        n_forecasts: predicted.len(),
        n_no_signal: predicted.iter().filter(|s| **s == 0.0).count(),
        n_zero_realized: h.map_or(realized.iter().filter(|r| **r == 0.0).count(), |h| h.zero_realized),
        n_failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_fails_every_window() {
        let s = TimeSeries::new(vec![4.0; 300], 1.0, 0.0).unwrap();
        let r = run_backtest(&s, &BacktestConfig::new(100, vec![2, 3])).unwrap();
        assert_eq!(r.windows.len(), 200);
        assert!(r.total_failure());
        for s in &r.summaries {
            assert_eq!(s.hit_ratio, None);
            assert_eq!(s.n_failed, 200);
        }
    }

    #[test]
    fn window_count_and_stride() {
        let v: Vec<f64> = (0..400).map(|k| (k as f64 * 0.37).sin() + 0.01 * k as f64).collect();
        let s = TimeSeries::new(v, 1.0, 0.0).unwrap();
        let mut cfg = BacktestConfig::new(100, vec![2]);
        cfg.stride = 7;
        cfg.step = 3;
        let r = run_backtest(&s, &cfg).unwrap();
        assert_eq!(r.windows.len(), (99..397).step_by(7).count());
        assert_eq!(r.windows[1].end, 106);
        assert_eq!(r.windows[0].realized_increment, s.values()[102] - s.values()[99]);
    }

    #[test]
    fn invalid_configs() {
        let s = TimeSeries::new((0..50).map(f64::from).collect(), 1.0, 0.0).unwrap();
        assert!(run_backtest(&s, &BacktestConfig::new(49, vec![2])).is_err());
        assert!(run_backtest(&s, &BacktestConfig::new(20, vec![1])).is_err());
        assert!(run_backtest(&s, &BacktestConfig::new(10, vec![12])).is_err());
    }
}
