use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::decomposition::{solve_coefficients, DEFAULT_TOL};
use crate::error::{LfsmError, Result};
use crate::stable::abs_moment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpErrorQuery {
    pub alpha: f64,
    pub hurst: f64,
    pub d: usize,
    pub p: f64,
}

/// L^p norm of the one-step residual `a_{1,d-1,d-1} Z_{d-1}` of a unit-scale
/// process.
pub fn lp_residual_norm(q: &LpErrorQuery) -> Result<f64> {
    if !(q.p > 0.0 && q.p < q.alpha) {
        return Err(LfsmError::invalid(format!(
            "moment order must lie in (0, alpha = {}), got {}",
            q.alpha, q.p
        )));
    }
    if q.d < 2 {
        return Err(LfsmError::invalid("residual norm needs d >= 2"));
    }
    let (coeffs, _) = solve_coefficients(q.alpha, q.hurst, 1, q.d, DEFAULT_TOL)?;
    let moment = abs_moment(q.alpha, q.p)?;
    Ok(coeffs.diag(q.d - 1).abs() * moment.powf(1.0 / q.p))
}

/// Probability that consecutive unit increments of an fBm share their sign.
pub fn fbm_hit_ratio(hurst: f64) -> f64 {
    let r = 2f64.powf(2.0 * hurst - 1.0) - 1.0;
    0.5 + r.abs().min(1.0).asin() / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitRatio {
    /// `matches / usable`.
    pub ratio: f64,
    pub matches: usize,
    pub usable: usize,
    pub total: usize,
    /// Forecasts carrying no sign.
    pub no_signal: usize,
    /// Realized increments exactly zero, among forecasts that had a sign.
    pub zero_realized: usize,
}

/// Share of forecasts whose sign matches the realized one. A zero in
/// `predicted` marks a no-signal forecast and a zero in `realized` a flat
/// move; both are ties, excluded from the ratio and counted.
pub fn hit_ratio(predicted: &[f64], realized: &[f64]) -> Result<HitRatio> {
    if predicted.len() != realized.len() {
        return Err(LfsmError::invalid(format!(
            "sign sequences differ in length: {} vs {}",
            predicted.len(),
            realized.len()
        )));
    }
    let mut out = HitRatio {
        ratio: f64::NAN,
        matches: 0,
        usable: 0,
        total: predicted.len(),
        no_signal: 0,
        zero_realized: 0,
    };
    for (&f, &r) in predicted.iter().zip(realized) {
        if f == 0.0 || f.is_nan() {
            out.no_signal += 1;
        } else if r == 0.0 || r.is_nan() {
            out.zero_realized += 1;
        } else {
            out.usable += 1;
            if f.signum() == r.signum() {
                out.matches += 1;
            }
        }
    }
    if out.usable == 0 {
        return Err(LfsmError::NoUsableForecasts {
            total: out.total,
            ties: out.no_signal + out.zero_realized,
        });
    }
    out.ratio = out.matches as f64 / out.usable as f64;
    Ok(out)
}
