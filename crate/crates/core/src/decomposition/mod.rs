//! Codifference-matched triangular decomposition
//! `TX_{t+i} = Σ_{j≤i} a_{t,i,j} Z_j` of LFSM observations into independent
//! unit-scale SαS innovations.
//!
//! The `d(d+1)/2` equations are solved one at a time in lexicographic order:
//! row `i'` solves its off-diagonal equations `(i', 0), ..., (i', i'-1)` and
//! then its diagonal. Each solver lives behind [`CoefficientSolver`] and is
//! registered by name in a [`SolverRegistry`].

mod cache;
mod cascade;
mod frontier;
mod solver;

use serde::Serialize;
use thiserror::Error;

pub use cache::CoefficientCache;
pub use cascade::{equation_residuals, newton_solve_offdiag, Direction, NewtonOutcome};
pub use frontier::{scan_existence_frontier, FrontierRow};
pub use solver::{
    ClosedFormLevy, CoefficientSolver, GaussianCascade, NewtonCascade, SolverRegistry,
};

use crate::error::Result;
use crate::stable::check_alpha;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITER: usize = 100;

/// Lower-triangular coefficients `a_{t,i,j}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCoeffs {
    pub t: usize,
    pub d: usize,
    pub alpha: f64,
    pub hurst: f64,
    a: Vec<f64>,
}

impl DecompositionCoeffs {
    pub(crate) fn zeros(alpha: f64, hurst: f64, t: usize, d: usize) -> Self {
        Self {
            t,
            d,
            alpha,
            hurst,
            a: vec![0.0; d * d],
        }
    }

    /// `a_{t,i,j}`; zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.d + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.d + j] = v;
    }

    /// Row `i` up to and including the diagonal.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.d..i * self.d + i + 1]
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.get(i, i)
    }

    /// Dense `d × d` rows.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.d)
            .map(|i| self.a[i * self.d..(i + 1) * self.d].to_vec())
            .collect()
    }
}

/// Per-equation diagnostics of a successful solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationRecord {
    pub row: usize,
    pub col: usize,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solver: &'static str,
    pub converged: bool,
    pub equations: Vec<EquationRecord>,
    pub max_residual: f64,
    pub frontier_violation: Option<String>,
}

impl SolveReport {
    pub(crate) fn new(solver: &'static str) -> Self {
        Self {
            solver,
            converged: true,
            equations: Vec::new(),
            max_residual: 0.0,
            frontier_violation: None,
        }
    }

    pub(crate) fn push(&mut self, row: usize, col: usize, iterations: usize, residual: f64) {
        self.max_residual = self.max_residual.max(residual.abs());
        self.equations.push(EquationRecord {
            row,
            col,
            iterations,
            residual,
        });
    }

    pub fn total_iterations(&self) -> usize {
        self.equations.iter().map(|e| e.iterations).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("equation ({row},{row}): right-hand side {rhs:e} is not positive")]
    NonPositiveDiagonal { row: usize, rhs: f64 },

    #[error("equation ({row},{col}): target {target:e} outside the range ({lo:e}, {hi:e}) of f on its domain")]
    NoSolution {
        row: usize,
        col: usize,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("equation ({row},{col}): no convergence after {iterations} iterations, residual {residual:e}")]
    NotConverged {
        row: usize,
        col: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("equation ({row},{col}): coefficient {value} breaks the column ordering against {previous}")]
    Monotonicity {
        row: usize,
        col: usize,
        value: f64,
        previous: f64,
    },

    #[error("solver `{solver}` does not handle alpha={alpha}, hurst={hurst}")]
    Unsupported {
        solver: &'static str,
        alpha: f64,
        hurst: f64,
    },

    #[error("unknown solver `{0}`")]
    UnknownSolver(String),

    #[error("kernel constant unavailable: {0}")]
    Kernel(String),

    #[error("invalid decomposition input: {0}")]
    Invalid(String),
}

impl DecompositionError {
    /// First failing equation `(row, col)`, when the failure is tied to one.
    pub fn equation(&self) -> Option<(usize, usize)> {
        match *self {
            DecompositionError::NonPositiveDiagonal { row, .. } => Some((row, row)),
            DecompositionError::NoSolution { row, col, .. }
            | DecompositionError::NotConverged { row, col, .. }
            | DecompositionError::Monotonicity { row, col, .. } => Some((row, col)),
            _ => None,
        }
    }

    /// Failures that mark a point outside the existence region.
    pub fn is_frontier_violation(&self) -> bool {
        matches!(
            self,
            DecompositionError::NonPositiveDiagonal { .. }
                | DecompositionError::NoSolution { .. }
                | DecompositionError::Monotonicity { .. }
        )
    }
}

pub(crate) fn validate_inputs(
    alpha: f64,
    hurst: f64,
    t: usize,
    d: usize,
    tol: f64,
) -> std::result::Result<(), DecompositionError> {
    if check_alpha(alpha).is_err() {
        return Err(DecompositionError::Invalid(format!("alpha {alpha} not in (0, 2]")));
    }
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(DecompositionError::Invalid(format!("hurst {hurst} not in (0, 1)")));
    }
    if t == 0 {
        return Err(DecompositionError::Invalid("base time t must be >= 1".into()));
    }
    if d == 0 {
        return Err(DecompositionError::Invalid("dimension d must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(DecompositionError::Invalid(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Solves the system with the solver the default registry selects for
/// `(alpha, hurst)`.
pub fn solve_coefficients(
    alpha: f64,
    hurst: f64,
    t: usize,
    d: usize,
    tol: f64,
) -> Result<(DecompositionCoeffs, SolveReport)> {
    let registry = SolverRegistry::default();
    let solver = registry.auto(alpha, hurst);
    Ok(solver.solve(alpha, hurst, t, d, tol)?)
}
