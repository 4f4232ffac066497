//! The linear fractional stable motion: kernel constant, autocodifference and
//! Riemann-sum path simulation.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{LfsmError, Result};
use crate::quadrature::{tanh_sinh, QuadResult};
use crate::rng::RngState;
use crate::stable::{check_alpha, draw_unit};

/// `|H - 1/α|` below this is treated as the Lévy-motion case.
pub const LEVY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfsmParams {
    pub alpha: f64,
    pub hurst: f64,
    pub sigma: f64,
}

impl LfsmParams {
    pub fn new(alpha: f64, hurst: f64, sigma: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(LfsmError::invalid(format!("hurst must lie in (0, 1), got {hurst}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(LfsmError::invalid(format!("sigma must be finite and > 0, got {sigma}")));
        }
        Ok(Self { alpha, hurst, sigma })
    }

    pub fn standard(alpha: f64, hurst: f64) -> Result<Self> {
        Self::new(alpha, hurst, 1.0)
    }

    /// Exponent `H - 1/α` of the moving-average kernel.
    pub fn memory(&self) -> f64 {
        self.hurst - 1.0 / self.alpha
    }

    /// Independent increments (`H = 1/α`).
    pub fn is_levy(&self) -> bool {
        self.memory().abs() < LEVY_TOL
    }
}

/// Uniformly sampled observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
    t0: f64,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(LfsmError::invalid("a time series needs at least 2 values"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(LfsmError::invalid(format!("time step must be > 0, got {dt}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LfsmError::invalid(format!("non-finite value at index {i}")));
        }
        Ok(Self { values, dt, t0 })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Overlapping increments `X[k + lag] - X[k]`.
    pub fn increments(&self, lag: usize) -> Vec<f64> {
        if lag == 0 || lag >= self.values.len() {
            return Vec::new();
        }
        self.values
            .windows(lag + 1)
            .map(|w| w[lag] - w[0])
            .collect()
    }

    /// Every `every`-th sample starting from the first.
    pub fn subsample(&self, every: usize) -> Result<Self> {
        if every == 0 {
            return Err(LfsmError::invalid("subsampling stride must be >= 1"));
        }
        let values: Vec<f64> = self.values.iter().step_by(every).copied().collect();
        Self::new(values, self.dt * every as f64, self.t0)
    }

    /// Contiguous slice `[start, end)` as a new series.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.values.len() {
            return Err(LfsmError::invalid(format!("bad slice {start}..{end}")));
        }
        Self::new(self.values[start..end].to_vec(), self.dt, self.time(start))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            dt: self.dt,
            t0: self.t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Length of the past, before time 0, kept in the kernel integral.
    pub truncation: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            horizon: 10.0,
            truncation: 50.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.horizon > 0.0) || !(self.truncation >= 0.0) {
            return Err(LfsmError::invalid(format!(
                "simulation needs dt > 0, horizon > 0, truncation >= 0; got {self:?}"
            )));
        }
        if self.horizon < self.dt {
            return Err(LfsmError::invalid("horizon shorter than one time step"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn past_steps(&self) -> usize {
        (self.truncation / self.dt).round() as usize
    }
}

/// `K_{α,H}`, the L^α norm of the kernel `(1-s)_+^{H-1/α} - (-s)_+^{H-1/α}`.
///
/// The part on (0, 1) is exactly `1/(αH)`. The rest, `∫_0^∞ |(1+u)^β - u^β|^α du`,
/// is integrated with tanh-sinh on (0, 1), after `v = u^{αH}` when `β < 0`, and
/// on a log scale over (1, U),
/// plus an asymptotic series in `1/u` beyond `U`.
pub fn kernel_constant(p: &LfsmParams) -> Result<f64> {
    Ok(kernel_constant_pow(p.alpha, p.hurst)?.powf(1.0 / p.alpha))
}

const TAIL_START: f64 = 1e4;

/// `K_{α,H}^α`.
pub fn kernel_constant_pow(alpha: f64, hurst: f64) -> Result<f64> {
    let beta = hurst - 1.0 / alpha;
    if beta.abs() < LEVY_TOL {
        return Ok(1.0);
    }
    let diff = |u: f64| -> f64 {
        if u <= 1.0 {
            (1.0 + u).powf(beta) - u.powf(beta)
        } else {
            u.powf(beta) * (beta * (1.0 / u).ln_1p()).exp_m1()
        }
    };
    let near = if beta < 0.0 {
        // |diff(u)|^α = u^{αH-1} (1 - (u/(1+u))^{-β})^α; v = u^{αH} absorbs the singularity
        let e = alpha * hurst;
        let r = tanh_sinh(
            |v, _| {
                let u = v.powf(1.0 / e);
                (-(-beta * (u / (1.0 + u)).ln()).exp_m1()).powf(alpha)
            },
            1e-13,
        );
        QuadResult { value: r.value / e, ..r }
    } else {
        tanh_sinh(|x, _| diff(x).abs().powf(alpha), 1e-13)
    };
    let span = TAIL_START.ln();
    let mid = tanh_sinh(
        |x, _| {
            let u = (span * x).exp();
            diff(u).abs().powf(alpha) * u * span
        },
        1e-13,
    );
    let value = near.value + mid.value + kernel_tail(alpha, beta, TAIL_START);
    for r in [&near, &mid] {
        if !r.converged || !value.is_finite() {
            return Err(LfsmError::Quadrature {
                estimate: value,
                error_estimate: r.error_estimate,
            });
        }
    }
    Ok(1.0 / (alpha * hurst) + value)
}

/// `∫_U^∞ |(1+u)^β - u^β|^α du` from the expansion
/// `(1+u)^β - u^β = β u^{β-1} (1 + c1/u + c2/u² + c3/u³ + ...)`.
fn kernel_tail(alpha: f64, beta: f64, start: f64) -> f64 {
    let c1 = (beta - 1.0) / 2.0;
    let c2 = c1 * (beta - 2.0) / 3.0;
    let c3 = c2 * (beta - 3.0) / 4.0;
    let a1 = alpha * (alpha - 1.0);
    let e = [
        1.0,
        alpha * c1,
        alpha * c2 + a1 / 2.0 * c1 * c1,
        alpha * c3 + a1 * c1 * c2 + a1 * (alpha - 2.0) / 6.0 * c1.powi(3),
    ];
    let gamma = alpha * (beta - 1.0);
    let sum: f64 = e
        .iter()
        .enumerate()
        .map(|(k, ek)| {
            let p = gamma - k as f64 + 1.0;
            ek * start.powf(p) / -p
        })
        .sum();
    beta.abs().powf(alpha) * sum
}

/// Autocodifference `CD(X_t, X_s)` of `σX` for an LFSM `X`.
pub fn lfsm_codifference(p: &LfsmParams, s: f64, t: f64) -> Result<f64> {
    let kpow = kernel_constant_pow(p.alpha, p.hurst)?;
    Ok(codifference_with(kpow, p, s, t))
}

pub(crate) fn codifference_with(kpow: f64, p: &LfsmParams, s: f64, t: f64) -> f64 {
    let e = p.alpha * p.hurst;
    p.sigma.powf(p.alpha) * kpow * (t.abs().powf(e) + s.abs().powf(e) - (t - s).abs().powf(e))
}

// direct convolution below this many multiply-adds, FFT above
const DIRECT_WORK_LIMIT: usize = 4_000_000;

/// Riemann-sum path of `σX` on the grid `0, dt, ..., horizon`.
///
/// The driving Lévy motion contributes one SαS increment of scale `dt^{1/α}`
/// per cell `[m dt, (m+1) dt)`, `m = -past_steps .. steps - 1`, drawn in that
/// order. Each cell's kernel is evaluated at its midpoint, which keeps the
/// weights finite next to the kernel singularities.
pub fn simulate_lfsm(p: &LfsmParams, cfg: &SimConfig, rng: &mut RngState) -> Result<TimeSeries> {
    cfg.validate()?;
    let n = cfg.steps();
    let m = cfg.past_steps();
    let beta = p.memory();
    let eps: Vec<f64> = (0..m + n).map(|_| draw_unit(p.alpha, rng)).collect();
    let factor = p.sigma * cfg.dt.powf(p.hurst);

    let mut values = Vec::with_capacity(n + 1);
    if p.is_levy() {
        let mut acc = 0.0;
        values.push(0.0);
        for e in &eps[m..] {
            acc += e;
            values.push(factor * acc);
        }
        return TimeSeries::new(values, cfg.dt, 0.0);
    }

    // weight of a cell whose midpoint lies `k - 1/2` steps in the past
    let weights: Vec<f64> = (0..=m + n)
        .map(|k| if k == 0 { 0.0 } else { (k as f64 - 0.5).powf(beta) })
        .collect();
    let moving = if (n + 1) * (m + n) <= DIRECT_WORK_LIMIT {
        convolve_direct(&weights, &eps, m, n)
    } else {
        convolve_fft(&weights, &eps, m, n)
    };
    let base = moving[0];
    values.extend(moving.iter().map(|y| factor * (y - base)));
    TimeSeries::new(values, cfg.dt, 0.0)
}

/// `Y_k = Σ_{idx < k+m} w[k+m-idx] e[idx]` for `k = 0..=n`.
fn convolve_direct(w: &[f64], e: &[f64], m: usize, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let top = k + m;
            e[..top]
                .iter()
                .enumerate()
                .map(|(idx, x)| w[top - idx] * x)
                .sum()
        })
        .collect()
}

fn convolve_fft(w: &[f64], e: &[f64], m: usize, n: usize) -> Vec<f64> {
    let len = (w.len() + e.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);

    let mut a: Vec<Complex<f64>> = w.iter().map(|&x| Complex::new(x, 0.0)).collect();
    a.resize(len, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = e.iter().map(|&x| Complex::new(x, 0.0)).collect();
    b.resize(len, Complex::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let norm = 1.0 / len as f64;
    (0..=n).map(|k| a[k + m].re * norm).collect()
}
