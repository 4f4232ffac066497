//! Estimation of `(α, H, σ)` from log-log regressions of the empirical
//! characteristic function of increments.
//!
//! `ln(-ln Φ(θ))` of the increments at lag `τ` equals
//! `α ln|θ| + αH ln τ + const`, so a regression over `θ` at fixed `τ0` gives
//! `α`, and a regression over `τ` at `θ = 1` gives `αH`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{LfsmError, Result};
use crate::model::TimeSeries;

/// Grid points with `Φ̂` this close to 0 or 1 are dropped.
pub const PHI_EDGE: f64 = 1e-12;
pub const MIN_ALPHA_HAT: f64 = 0.05;
pub const H_CLAMP: (f64, f64) = (0.01, 0.99);
/// After normalization the largest `θ` of the grid meets increments of
/// typical size `THETA_REACH / θ_max`.
const THETA_REACH: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    /// Reference lag, in time units.
    pub tau0: f64,
    pub theta_grid: Vec<f64>,
    /// Lags in time units for the `H` regression; `None` means
    /// `τ0 · {1, 2, 4, 8, 16}`.
    pub tau_grid: Option<Vec<f64>>,
}

impl EstimationConfig {
    pub fn new(tau0: f64) -> Self {
        Self {
            tau0,
            theta_grid: (1..=20).map(f64::from).collect(),
            tau_grid: None,
        }
    }

    pub fn taus(&self) -> Vec<f64> {
        match &self.tau_grid {
            Some(g) => g.clone(),
            None => [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|k| k * self.tau0).collect(),
        }
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        if self.theta_grid.is_empty() || self.theta_grid.iter().any(|&t| !(t > 0.0)) {
            return Err(LfsmError::invalid("theta grid must be non-empty and positive"));
        }
        lag_steps(self.tau0, dt)?;
        let taus = self.taus();
        if taus.len() < 2 {
            return Err(LfsmError::invalid("tau grid needs at least 2 lags"));
        }
        for tau in taus {
            lag_steps(tau, dt)?;
        }
        Ok(())
    }
}

/// Lag in samples for a duration `tau`; must be a positive multiple of `dt`.
pub fn lag_steps(tau: f64, dt: f64) -> Result<usize> {
    let k = (tau / dt).round();
    if !(k >= 1.0) || ((tau / dt) - k).abs() > 1e-6 * k.max(1.0) {
        return Err(LfsmError::invalid(format!(
            "lag {tau} is not a positive multiple of the time step {dt}"
        )));
    }
    Ok(k as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimationResult {
    pub alpha_hat: f64,
    pub h_hat: f64,
    /// Absent when `α̂ ≤ 1`, where the first absolute moment is infinite.
    pub sigma_hat: Option<f64>,
    pub alpha_fit: RegressionFit,
    pub h_fit: RegressionFit,
}

/// Real part of the empirical characteristic function, `(1/n) Σ cos(θ Y_i)`.
pub fn empirical_char_fn(samples: &[f64], theta: f64) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    samples.iter().map(|y| (theta * y).cos()).sum::<f64>() / samples.len() as f64
}

fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Median absolute value, falling back to the mean when more than half of
/// the values are zero.
fn robust_scale(xs: &[f64]) -> f64 {
    let mut abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    abs.sort_by(|a, b| a.total_cmp(b));
    let median = abs[abs.len() / 2];
    if median > 0.0 {
        median
    } else {
        abs.iter().sum::<f64>() / abs.len() as f64
    }
}

/// Regresses `ln(-ln Φ̂)` on `ln x` over the points with `Φ̂` inside (0, 1).
fn loglog_fit(what: &str, xs: &[f64], phis: &[f64]) -> Result<RegressionFit> {
    let mut points = Vec::with_capacity(xs.len());
    let mut dropped = Vec::new();
    for (&x, &phi) in xs.iter().zip(phis) {
        if phi > PHI_EDGE && phi < 1.0 - PHI_EDGE {
            points.push((x.ln(), (-phi.ln()).ln()));
        } else {
            dropped.push(format!("{x}: {phi:.3e}"));
        }
    }
    let distinct = points.iter().any(|p| p.0 != points[0].0);
    if points.len() < 2 || !distinct {
        return Err(LfsmError::Estimation(format!(
            "{what} regression has {} usable points; empirical characteristic function outside (0,1) at [{}]",
            points.len(),
            dropped.join(", ")
        )));
    }
    let (slope, intercept) = ols(&points);
    Ok(RegressionFit {
        slope,
        intercept,
        points_used: points.len(),
    })
}

fn check_length(series: &TimeSeries, cfg: &EstimationConfig) -> Result<()> {
    cfg.validate(series.dt())?;
    let max_lag = cfg
        .taus()
        .iter()
        .chain(std::iter::once(&cfg.tau0))
        .map(|&t| lag_steps(t, series.dt()).unwrap_or(0))
        .max()
        .unwrap_or(1);
    if series.len() < 2 * max_lag {
        return Err(LfsmError::Estimation(format!(
            "series of {} samples is shorter than twice the largest lag ({max_lag} samples)",
            series.len()
        )));
    }
    Ok(())
}

/// Slope of the `θ` regression at lag `τ0`, clamped to `(0, 2]`.
pub fn estimate_alpha(series: &TimeSeries, cfg: &EstimationConfig) -> Result<RegressionFit> {
    check_length(series, cfg)?;
    let incs = series.increments(lag_steps(cfg.tau0, series.dt())?);
    let scale = robust_scale(&incs);
    if !(scale > 0.0) {
        return Err(LfsmError::Estimation(
            "increments are identically zero; empirical characteristic function is 1".into(),
        ));
    }
    let theta_max = cfg.theta_grid.iter().cloned().fold(f64::MIN, f64::max);
    let c = THETA_REACH / (theta_max * scale);
    let y: Vec<f64> = incs.iter().map(|v| v * c).collect();
    let phis: Vec<f64> = cfg.theta_grid.iter().map(|&th| empirical_char_fn(&y, th)).collect();
    let mut fit = loglog_fit("theta", &cfg.theta_grid, &phis)?;
    fit.slope = fit.slope.clamp(MIN_ALPHA_HAT, 2.0);
    Ok(fit)
}

/// Slope `S₂` of the `τ` regression at `θ = 1`, and `Ĥ = S₂/S₁`.
pub fn estimate_h(
    series: &TimeSeries,
    cfg: &EstimationConfig,
    alpha_fit: &RegressionFit,
) -> Result<(RegressionFit, f64)> {
    check_length(series, cfg)?;
    let taus = cfg.taus();
    let lags: Vec<usize> = taus
        .iter()
        .map(|&t| lag_steps(t, series.dt()))
        .collect::<Result<_>>()?;
    let longest = *lags.iter().max().expect("validated non-empty");
    // one common normalization keeps the slope intact
    let scale = robust_scale(&series.increments(longest));
    if !(scale > 0.0) {
        return Err(LfsmError::Estimation(
            "increments are identically zero; empirical characteristic function is 1".into(),
        ));
    }
    let phis: Vec<f64> = lags
        .iter()
        .map(|&lag| {
            let y: Vec<f64> = series.increments(lag).iter().map(|v| v / scale).collect();
            empirical_char_fn(&y, 1.0)
        })
        .collect();
    let fit = loglog_fit("tau", &taus, &phis)?;
    let h = (fit.slope / alpha_fit.slope).clamp(H_CLAMP.0, H_CLAMP.1);
    Ok((fit, h))
}

/// `σ̂ = π / (2Γ(1 - 1/α̂)) · mean |X_{t+τ0} - X_t|`, defined for `α̂ > 1`.
pub fn estimate_sigma(series: &TimeSeries, tau0: f64, alpha_hat: f64) -> Result<f64> {
    if !(alpha_hat > 1.0) {
        return Err(LfsmError::Unsupported(format!(
            "sigma estimator needs alpha > 1 for a finite mean, got {alpha_hat}"
        )));
    }
    let incs = series.increments(lag_steps(tau0, series.dt())?);
    if incs.is_empty() {
        return Err(LfsmError::Estimation("no increments at lag tau0".into()));
    }
    let mean_abs = incs.iter().map(|v| v.abs()).sum::<f64>() / incs.len() as f64;
    Ok(PI / (2.0 * gamma(1.0 - 1.0 / alpha_hat)) * mean_abs)
}

/// Runs the three estimators in sequence.
pub fn estimate(series: &TimeSeries, cfg: &EstimationConfig) -> Result<EstimationResult> {
    let alpha_fit = estimate_alpha(series, cfg)?;
    let (h_fit, h_hat) = estimate_h(series, cfg, &alpha_fit)?;
    let sigma_hat = estimate_sigma(series, cfg.tau0, alpha_fit.slope).ok();
    Ok(EstimationResult {
        alpha_hat: alpha_fit.slope,
        h_hat,
        sigma_hat,
        alpha_fit,
        h_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate_lfsm, LfsmParams, SimConfig};
    use crate::rng::RngState;
    use crate::stable::{sample_sas, StableScale};

    fn cumulative(incs: &[f64], dt: f64) -> TimeSeries {
        let mut v = vec![0.0];
        let mut acc = 0.0;
        for x in incs {
            acc += x;
            v.push(acc);
        }
        TimeSeries::new(v, dt, 0.0).unwrap()
    }

    #[test]
    fn ecf_trivial_values() {
        assert_eq!(empirical_char_fn(&[0.0, 0.0, 0.0], 3.0), 1.0);
        assert_eq!(empirical_char_fn(&[1.0, -2.5, 7.0], 0.0), 1.0);
        assert_eq!(empirical_char_fn(&[PI, -PI], 1.0), -1.0);
    }

    #[test]
    fn constant_series_fails() {
        let s = TimeSeries::new(vec![3.0; 200], 1.0, 0.0).unwrap();
        let e = estimate_alpha(&s, &EstimationConfig::new(1.0)).unwrap_err();
        assert!(matches!(e, LfsmError::Estimation(_)));
    }

    #[test]
    fn short_series_fails() {
        let s = TimeSeries::new((0..20).map(|k| (k as f64).sin()).collect(), 1.0, 0.0).unwrap();
        let e = estimate_alpha(&s, &EstimationConfig::new(1.0)).unwrap_err();
        assert!(e.to_string().contains("shorter"), "{e}");
    }

    #[test]
    fn lag_must_be_multiple_of_dt() {
        assert_eq!(lag_steps(0.1, 0.01).unwrap(), 10);
        assert!(lag_steps(0.015, 0.01).is_err());
        assert!(lag_steps(0.001, 0.01).is_err());
    }

    #[test]
    fn gaussian_increments_give_alpha_near_two() {
        let incs = sample_sas(StableScale::unit(2.0).unwrap(), 10_000, &mut RngState::new(3));
        let s = cumulative(&incs, 1.0);
        let fit = estimate_alpha(&s, &EstimationConfig::new(1.0)).unwrap();
        assert!(fit.slope >= 1.85 && fit.slope <= 2.0, "{fit:?}");
    }

    #[test]
    fn levy_path_hurst_is_inverse_alpha() {
        let incs = sample_sas(StableScale::unit(1.6).unwrap(), 10_000, &mut RngState::new(4));
        let s = cumulative(&incs, 1.0);
        let r = estimate(&s, &EstimationConfig::new(1.0)).unwrap();
        assert!((r.h_hat - 1.0 / r.alpha_hat).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn sigma_of_unit_gaussian_increments_is_one() {
        let incs = sample_sas(StableScale::unit(2.0).unwrap(), 100_000, &mut RngState::new(5));
        let s = cumulative(&incs, 1.0);
        let sigma = estimate_sigma(&s, 1.0, 2.0).unwrap();
        assert!((sigma - 1.0).abs() < 0.02, "{sigma}");
        let scaled = estimate_sigma(&s.scaled(3.5), 1.0, 2.0).unwrap();
        assert!((scaled - 3.5 * sigma).abs() < 1e-12 * scaled);
        assert!(estimate_sigma(&s, 1.0, 1.0).is_err());
    }

    #[test]
    fn shift_and_scale_invariance() {
        let p = LfsmParams::standard(1.7, 0.6).unwrap();
        let cfg = SimConfig {
            dt: 0.01,
            horizon: 10.0,
            truncation: 5.0,
        };
        let s = simulate_lfsm(&p, &cfg, &mut RngState::new(6)).unwrap();
        let ecfg = EstimationConfig::new(0.1);
        let base = estimate(&s, &ecfg).unwrap();
        let shifted = TimeSeries::new(s.values().iter().map(|v| v + 12.5).collect(), s.dt(), 0.0)
            .unwrap();
        let r = estimate(&shifted, &ecfg).unwrap();
        assert!((r.alpha_hat - base.alpha_hat).abs() < 1e-9);
        assert!((r.h_hat - base.h_hat).abs() < 1e-9);
        let r = estimate(&s.scaled(40.0), &ecfg).unwrap();
        assert!((r.alpha_hat - base.alpha_hat).abs() < 1e-9);
        assert!((r.h_hat - base.h_hat).abs() < 1e-9);
        let (s1, s2) = (base.sigma_hat.unwrap(), r.sigma_hat.unwrap());
        assert!((s2 - 40.0 * s1).abs() < 1e-9 * s2);
    }
}
