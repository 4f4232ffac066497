//! One-step-ahead forecasting from the triangular decomposition.
//!
//! Observations are translated to start at zero at the anchor `X_{t-1}` and
//! divided by σ, so the `t = 1` coefficients serve every window. The forecast
//! of the next translated value is `Σ_{j≤d-2} a_{1,d-1,j} Z_j`; this is the
//! conditional expectation for α > 1 and the semimetric projection onto the
//! span of the extracted innovations for α ≤ 1.

use serde::Serialize;

use crate::decomposition::{solve_coefficients, CoefficientCache, DecompositionCoeffs, DEFAULT_TOL};
use crate::error::{LfsmError, Result};
use crate::model::LfsmParams;

/// Diagonal coefficients at or below this are treated as singular.
pub const DIAG_TOL: f64 = 1e-12;
/// Relative size under which a predicted increment carries no sign.
pub const NO_SIGNAL_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnovationVector {
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastMethod {
    ConditionalExpectation,
    SemimetricProjection,
}

impl ForecastMethod {
    pub fn for_alpha(alpha: f64) -> Self {
        if alpha > 1.0 {
            ForecastMethod::ConditionalExpectation
        } else {
            ForecastMethod::SemimetricProjection
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ForecastMethod::ConditionalExpectation => "conditional_expectation",
            ForecastMethod::SemimetricProjection => "semimetric_projection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastResult {
    /// Forecast of the next observation, in the units of the input.
    pub predicted: f64,
    /// `predicted` minus the last observation.
    pub predicted_increment: f64,
    pub innovations: InnovationVector,
    /// `|a_{1,d-1,d-1}| σ`, the scale of the forecast residual.
    pub residual_scale: f64,
    pub method: ForecastMethod,
    /// The predicted increment is zero to round-off.
    pub no_signal: bool,
}

impl ForecastResult {
    /// Sign of the predicted increment, `None` when there is no signal.
    pub fn direction(&self) -> Option<f64> {
        if self.no_signal {
            None
        } else {
            Some(self.predicted_increment.signum())
        }
    }
}

/// Forward substitution `Z_i = (Y_{i+1} - Σ_{j<i} a_{1,i,j} Z_j) / a_{1,i,i}`.
pub fn extract_innovations(obs: &[f64], coeffs: &DecompositionCoeffs) -> Result<InnovationVector> {
    if obs.len() > coeffs.d {
        return Err(LfsmError::invalid(format!(
            "{} observations need coefficients of dimension >= {}, got {}",
            obs.len(),
            obs.len(),
            coeffs.d
        )));
    }
    let mut z = Vec::with_capacity(obs.len());
    for (i, &y) in obs.iter().enumerate() {
        let diag = coeffs.diag(i);
        if !(diag > DIAG_TOL) {
            return Err(LfsmError::IllConditioned { index: i, value: diag });
        }
        let partial: f64 = (0..i).map(|j| coeffs.get(i, j) * z[j]).sum();
        z.push((y - partial) / diag);
    }
    Ok(InnovationVector { z })
}

/// Forecast from `window = [X_{t-1}, X_t, ..., X_{t+d-2}]` (the anchor followed
/// by `d - 1` observations) with coefficients solved at `t = 1`.
pub fn predict_with_coeffs(window: &[f64], coeffs: &DecompositionCoeffs, sigma: f64) -> Result<ForecastResult> {
    let d = coeffs.d;
    if d < 2 || window.len() != d {
        return Err(LfsmError::invalid(format!(
            "a dimension-{d} forecast needs {d} values (anchor plus {} observations), got {}",
            d.saturating_sub(1),
            window.len()
        )));
    }
    if !(sigma > 0.0) {
        return Err(LfsmError::invalid(format!("sigma must be > 0, got {sigma}")));
    }
    let anchor = window[0];
    let translated: Vec<f64> = window[1..].iter().map(|x| (x - anchor) / sigma).collect();
    let innovations = extract_innovations(&translated, coeffs)?;
    let level: f64 = innovations
        .z
        .iter()
        .enumerate()
        .map(|(j, z)| coeffs.get(d - 1, j) * z)
        .sum();
    let last = translated[d - 2];
    let step = level - last;
    let magnitude = translated.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let no_signal = step.abs() <= NO_SIGNAL_REL * magnitude;
    Ok(ForecastResult {
        predicted: anchor + sigma * level,
        predicted_increment: sigma * step,
        innovations,
        residual_scale: coeffs.diag(d - 1).abs() * sigma,
        method: ForecastMethod::for_alpha(coeffs.alpha),
        no_signal,
    })
}

/// Solves the `t = 1` decomposition for `params` and forecasts the value
/// following `window`; `window.len()` is the dimension `d`.
pub fn predict_next(window: &[f64], params: &LfsmParams) -> Result<ForecastResult> {
    let d = window.len();
    if d < 2 {
        return Err(LfsmError::invalid("forecasting needs d >= 2"));
    }
    let (coeffs, _) = solve_coefficients(params.alpha, params.hurst, 1, d, DEFAULT_TOL)?;
    predict_with_coeffs(window, &coeffs, params.sigma)
}

/// As [`predict_next`], reusing coefficients from `cache`.
pub fn predict_next_cached(
    window: &[f64],
    params: &LfsmParams,
    cache: &CoefficientCache,
) -> Result<ForecastResult> {
    let d = window.len();
    if d < 2 {
        return Err(LfsmError::invalid("forecasting needs d >= 2"));
    }
    let coeffs = cache.get_or_solve(params.alpha, params.hurst, 1, d, DEFAULT_TOL)?;
    predict_with_coeffs(window, &coeffs, params.sigma)
}
