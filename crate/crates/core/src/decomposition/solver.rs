use std::collections::BTreeMap;
use std::sync::Arc;

use super::cascade::{run_cascade, solve_offdiag_from};
use super::{validate_inputs, DecompositionCoeffs, DecompositionError, SolveReport};
use crate::model::{kernel_constant_pow, LEVY_TOL};

/// A way of computing the triangular coefficients for `(α, H, t, d)`.
pub trait CoefficientSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether this solver is applicable at `(alpha, hurst)`.
    fn supports(&self, alpha: f64, hurst: f64) -> bool;

    fn solve(
        &self,
        alpha: f64,
        hurst: f64,
        t: usize,
        d: usize,
        tol: f64,
    ) -> Result<(DecompositionCoeffs, SolveReport), DecompositionError>;
}

fn is_levy(alpha: f64, hurst: f64) -> bool {
    (hurst - 1.0 / alpha).abs() < LEVY_TOL
}

fn kernel_pow(alpha: f64, hurst: f64) -> Result<f64, DecompositionError> {
    kernel_constant_pow(alpha, hurst).map_err(|e| DecompositionError::Kernel(e.to_string()))
}

/// `H = 1/α`: `a_{t,i,j} = t^{[j=0]/α} [i ≥ j]`.
#[derive(Debug, Default, Clone, Copy)]
pub struct ClosedFormLevy;

impl CoefficientSolver for ClosedFormLevy {
    fn name(&self) -> &'static str {
        "closed_form"
    }

    fn supports(&self, alpha: f64, hurst: f64) -> bool {
        is_levy(alpha, hurst)
    }

    fn solve(
        &self,
        alpha: f64,
        hurst: f64,
        t: usize,
        d: usize,
        tol: f64,
    ) -> Result<(DecompositionCoeffs, SolveReport), DecompositionError> {
        validate_inputs(alpha, hurst, t, d, tol)?;
        if !self.supports(alpha, hurst) {
            return Err(DecompositionError::Unsupported {
                solver: self.name(),
                alpha,
                hurst,
            });
        }
        let mut c = DecompositionCoeffs::zeros(alpha, hurst, t, d);
        let first = (t as f64).powf(1.0 / alpha);
        let mut report = SolveReport::new(self.name());
        for i in 0..d {
            c.set(i, 0, first);
            for j in 1..=i {
                c.set(i, j, 1.0);
            }
            for j in 0..=i {
                report.push(i, j, 0, 0.0);
            }
        }
        Ok((c, report))
    }
}

/// `α = 2`: each off-diagonal equation is linear in the unknown.
#[derive(Debug, Default, Clone, Copy)]
pub struct GaussianCascade;

impl CoefficientSolver for GaussianCascade {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn supports(&self, alpha: f64, hurst: f64) -> bool {
        alpha == 2.0 && !is_levy(alpha, hurst)
    }

    fn solve(
        &self,
        alpha: f64,
        hurst: f64,
        t: usize,
        d: usize,
        tol: f64,
    ) -> Result<(DecompositionCoeffs, SolveReport), DecompositionError> {
        validate_inputs(alpha, hurst, t, d, tol)?;
        if !self.supports(alpha, hurst) {
            return Err(DecompositionError::Unsupported {
                solver: self.name(),
                alpha,
                hurst,
            });
        }
        let kpow = kernel_pow(alpha, hurst)?;
        let rule = |target: f64, a: f64, _dir, _start, _row, _col| {
            let z = (target + a * a) / (2.0 * a);
            Ok(super::NewtonOutcome {
                z,
                iterations: 0,
                residual: 2.0 * z * a - a * a - target,
            })
        };
        run_cascade(self.name(), alpha, hurst, t, d, kpow, &rule)
    }
}

/// General case: safeguarded Newton-Raphson on each off-diagonal equation,
/// started just beyond the coefficient of the previous row.
#[derive(Debug, Default, Clone, Copy)]
pub struct NewtonCascade;

impl CoefficientSolver for NewtonCascade {
    fn name(&self) -> &'static str {
        "newton"
    }

    fn supports(&self, alpha: f64, hurst: f64) -> bool {
        !is_levy(alpha, hurst)
    }

    fn solve(
        &self,
        alpha: f64,
        hurst: f64,
        t: usize,
        d: usize,
        tol: f64,
    ) -> Result<(DecompositionCoeffs, SolveReport), DecompositionError> {
        validate_inputs(alpha, hurst, t, d, tol)?;
        if !self.supports(alpha, hurst) {
            return Err(DecompositionError::Unsupported {
                solver: self.name(),
                alpha,
                hurst,
            });
        }
        let kpow = kernel_pow(alpha, hurst)?;
        let rule = |target, a, dir, start, row, col| {
            solve_offdiag_from(target, a, alpha, dir, start, tol, row, col)
        };
        run_cascade(self.name(), alpha, hurst, t, d, kpow, &rule)
    }
}

/// Named solvers; `auto` picks the most specific one that applies.
#[derive(Clone)]
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn CoefficientSolver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(ClosedFormLevy));
        r.register(Arc::new(GaussianCascade));
        r.register(Arc::new(NewtonCascade));
        r
    }
}

impl std::fmt::Debug for SolverRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.solvers.keys()).finish()
    }
}

impl SolverRegistry {
    pub const AUTO: &'static str = "auto";

    pub fn empty() -> Self {
        Self {
            solvers: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, solver: Arc<dyn CoefficientSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn CoefficientSolver>> {
        self.solvers.get(name).cloned()
    }

    /// The closed form when `H = 1/α`, the linear cascade at `α = 2`, Newton
    /// otherwise. Falls back to any registered solver that supports the
    /// parameters.
    pub fn auto(&self, alpha: f64, hurst: f64) -> Arc<dyn CoefficientSolver> {
        for name in ["closed_form", "gaussian", "newton"] {
            if let Some(s) = self.solvers.get(name) {
                if s.supports(alpha, hurst) {
                    return s.clone();
                }
            }
        }
        self.solvers
            .values()
            .find(|s| s.supports(alpha, hurst))
            .cloned()
            .unwrap_or_else(|| Arc::new(NewtonCascade))
    }

    /// Resolves `name`, where `auto` defers to [`SolverRegistry::auto`]; a named
    /// solver must support `(α, H)`.
    pub fn select(
        &self,
        name: &str,
        alpha: f64,
        hurst: f64,
    ) -> Result<Arc<dyn CoefficientSolver>, DecompositionError> {
        if name == Self::AUTO {
            return Ok(self.auto(alpha, hurst));
        }
        let solver = self
            .get(name)
            .ok_or_else(|| DecompositionError::UnknownSolver(name.to_string()))?;
        if !solver.supports(alpha, hurst) {
            return Err(DecompositionError::Unsupported {
                solver: solver.name(),
                alpha,
                hurst,
            });
        }
        Ok(solver)
    }
}
