//! Symmetric α-stable primitives: characteristic function, sampling and
//! absolute moments of unit-scale variables.

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::gamma;

use crate::error::{LfsmError, Result};
use crate::rng::RngState;

/// Values of α this close to 1 are sampled with the Cauchy inverse CDF.
pub const CAUCHY_SNAP: f64 = 1e-6;

/// Stability index together with the scale γ = ‖X‖_α of a SαS law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableScale {
    alpha: f64,
    scale: f64,
}

impl StableScale {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(scale >= 0.0) || !scale.is_finite() {
            return Err(LfsmError::invalid(format!("scale must be finite and >= 0, got {scale}")));
        }
        Ok(Self { alpha, scale })
    }

    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(LfsmError::invalid(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

/// `exp(-scale^α |θ|^α)`.
pub fn sas_char_fn(theta: f64, s: StableScale) -> f64 {
    (-(s.scale * theta.abs()).powf(s.alpha)).exp()
}

/// One unit-scale SαS draw.
///
/// Chambers-Mallows-Stuck for α ≠ 1, inverse CDF of the standard Cauchy law
/// otherwise.
pub fn draw_unit(alpha: f64, rng: &mut RngState) -> f64 {
    let p = PI * (rng.open01() - 0.5);
    if (alpha - 1.0).abs() < CAUCHY_SNAP {
        return p.tan();
    }
    let q = rng.exp1();
    let cos_p = p.cos();
    (alpha * p).sin() / cos_p.powf(1.0 / alpha)
        * ((p * (1.0 - alpha)).cos() / q).powf((1.0 - alpha) / alpha)
}

/// `n` independent SαS draws of the given scale.
pub fn sample_sas(s: StableScale, n: usize, rng: &mut RngState) -> Vec<f64> {
    (0..n).map(|_| s.scale * draw_unit(s.alpha, rng)).collect()
}

/// `E|X|^p` for a unit-scale SαS variable `X`.
///
/// Finite for `p ∈ (-1, α)`; at α = 2 the variable is Normal(0, 2) and every
/// order `p > -1` is accepted.
pub fn abs_moment(alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(p > -1.0) {
        return Err(LfsmError::invalid(format!("moment order must exceed -1, got {p}")));
    }
    if alpha == 2.0 {
        // N(0,2): 2^{p/2} times the N(0,1) moment 2^{p/2} Γ((p+1)/2)/√π
        return Ok(2f64.powf(p) * gamma((p + 1.0) / 2.0) / PI.sqrt());
    }
    if p >= alpha {
        return Err(LfsmError::invalid(format!(
            "E|X|^p is infinite for p = {p} >= alpha = {alpha}"
        )));
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    if (p - 1.0).abs() < 1e-9 {
        return Ok(2.0 * gamma(1.0 - 1.0 / alpha) / PI);
    }
    Ok(gamma(1.0 - p / alpha) / (gamma(1.0 - p) * (p * FRAC_PI_2).cos()))
}
