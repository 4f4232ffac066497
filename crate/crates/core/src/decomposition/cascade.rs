use serde::Serialize;

use super::{DecompositionCoeffs, DecompositionError, SolveReport, MAX_NEWTON_ITER};

/// Side of `a_{t,i,i}` on which an off-diagonal coefficient is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `H > 1/α`: domain `(a_ii, ∞)`.
    Up,
    /// `H < 1/α`: domain `(0, a_ii)`.
    Down,
}

impl Direction {
    pub fn for_params(alpha: f64, hurst: f64) -> Self {
        if hurst > 1.0 / alpha {
            Direction::Up
        } else {
            Direction::Down
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    pub z: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn f(z: f64, a: f64, alpha: f64) -> f64 {
    z.abs().powf(alpha) - (z - a).abs().powf(alpha)
}

fn f_prime(z: f64, a: f64, alpha: f64) -> f64 {
    let w = z - a;
    alpha * (z.signum() * z.abs().powf(alpha - 1.0) - w.signum() * w.abs().powf(alpha - 1.0))
}

/// Solves `|z|^α - |z - a_ii|^α = target` on the domain selected by
/// `direction`, starting just beside `a_ii`.
pub fn newton_solve_offdiag(
    target: f64,
    a_ii: f64,
    alpha: f64,
    direction: Direction,
    tol: f64,
) -> Result<NewtonOutcome, DecompositionError> {
    let start = match direction {
        Direction::Up => a_ii * (1.0 + 1e-3),
        Direction::Down => a_ii * (1.0 - 1e-3),
    };
    solve_offdiag_from(target, a_ii, alpha, direction, start, tol, 0, 0)
}

/// Safeguarded Newton iteration: a Newton step is taken when it stays inside
/// the current bracket, a bisection step otherwise.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_offdiag_from(
    target: f64,
    a: f64,
    alpha: f64,
    direction: Direction,
    start: f64,
    tol: f64,
    row: usize,
    col: usize,
) -> Result<NewtonOutcome, DecompositionError> {
    if !(a > 0.0) {
        return Err(DecompositionError::Invalid(format!("diagonal coefficient {a} must be > 0")));
    }
    let a_pow = a.powf(alpha);
    let no_solution = |lo: f64, hi: f64| DecompositionError::NoSolution {
        row,
        col,
        target,
        lo,
        hi,
    };

    if alpha == 2.0 {
        // f(z) = 2 z a - a^2
        let z = (target + a * a) / (2.0 * a);
        let inside = match direction {
            Direction::Up => z > a,
            Direction::Down => z > 0.0 && z < a,
        };
        if !inside {
            return Err(match direction {
                Direction::Up => no_solution(a_pow, f64::INFINITY),
                Direction::Down => no_solution(-a_pow, a_pow),
            });
        }
        return Ok(NewtonOutcome {
            z,
            iterations: 0,
            residual: f(z, a, alpha) - target,
        });
    }

    let (mut lo, mut hi) = match direction {
        Direction::Up => {
            if alpha <= 1.0 {
                return Err(DecompositionError::Invalid(format!(
                    "increasing branch requires alpha > 1, got {alpha}"
                )));
            }
            if !(target > a_pow) {
                return Err(no_solution(a_pow, f64::INFINITY));
            }
            let mut hi = start.max(a) * 2.0;
            let mut expansions = 0;
            while f(hi, a, alpha) < target {
                hi *= 2.0;
                expansions += 1;
                if expansions > 2000 || !hi.is_finite() {
                    return Err(no_solution(a_pow, f64::INFINITY));
                }
            }
            (a, hi)
        }
        Direction::Down => {
            if !(target > -a_pow && target < a_pow) {
                return Err(no_solution(-a_pow, a_pow));
            }
            (0.0, a)
        }
    };

    let mut z = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    let mut residual = f(z, a, alpha) - target;
    for iter in 1..=MAX_NEWTON_ITER {
        if residual.abs() <= tol {
            return Ok(NewtonOutcome {
                z,
                iterations: iter - 1,
                residual,
            });
        }
        if residual < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        let slope = f_prime(z, a, alpha);
        let newton = z - residual / slope;
        let next = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == z {
            break;
        }
        z = next;
        residual = f(z, a, alpha) - target;
    }
    if residual.abs() <= tol {
        return Ok(NewtonOutcome {
            z,
            iterations: MAX_NEWTON_ITER,
            residual,
        });
    }
    Err(DecompositionError::NotConverged {
        row,
        col,
        iterations: MAX_NEWTON_ITER,
        residual,
    })
}

/// Off-diagonal rule used by the cascade: `(target, a_ii, direction, start,
/// row, col) -> outcome`.
pub(crate) type OffDiagonalRule<'a> = dyn Fn(f64, f64, Direction, f64, usize, usize) -> Result<NewtonOutcome, DecompositionError>
    + 'a;

/// Runs the lexicographic cascade with a pluggable off-diagonal solver.
pub(crate) fn run_cascade(
    solver: &'static str,
    alpha: f64,
    hurst: f64,
    t: usize,
    d: usize,
    kpow: f64,
    offdiag: &OffDiagonalRule<'_>,
) -> Result<(DecompositionCoeffs, SolveReport), DecompositionError> {
    let mut c = DecompositionCoeffs::zeros(alpha, hurst, t, d);
    let mut report = SolveReport::new(solver);
    let direction = Direction::for_params(alpha, hurst);
    let e = alpha * hurst;
    let tt = t as f64;

    for row in 0..d {
        for col in 0..row {
            let mut target = kpow * ((tt + row as f64).powf(e) - ((row - col) as f64).powf(e));
            for j in 0..col {
                let arj = c.get(row, j);
                target -= arj.abs().powf(alpha) - (arj - c.get(col, j)).abs().powf(alpha);
            }
            let previous = c.get(row - 1, col);
            let start = match direction {
                Direction::Up => previous * (1.0 + 1e-3),
                Direction::Down => previous * (1.0 - 1e-3),
            };
            let out = offdiag(target, c.diag(col), direction, start, row, col)?;
            let ordered = match direction {
                Direction::Up => out.z > previous,
                Direction::Down => out.z < previous,
            };
            if !ordered || !(out.z > 0.0) {
                return Err(DecompositionError::Monotonicity {
                    row,
                    col,
                    value: out.z,
                    previous,
                });
            }
            c.set(row, col, out.z);
            report.push(row, col, out.iterations, out.residual);
        }
        let mut rhs = kpow * (tt + row as f64).powf(e);
        for j in 0..row {
            rhs -= c.get(row, j).abs().powf(alpha);
        }
        if !(rhs > 0.0) {
            return Err(DecompositionError::NonPositiveDiagonal { row, rhs });
        }
        let diag = rhs.powf(1.0 / alpha);
        c.set(row, row, diag);
        let mut lhs = diag.powf(alpha);
        for j in 0..row {
            lhs += c.get(row, j).abs().powf(alpha);
        }
        report.push(row, row, 0, lhs - kpow * (tt + row as f64).powf(e));
    }
    Ok((c, report))
}

/// Residuals of every equation `(row, col)` of the system for `coeffs`,
/// in solve order. `kpow` is `K_{α,H}^α`.
pub fn equation_residuals(c: &DecompositionCoeffs, kpow: f64) -> Vec<(usize, usize, f64)> {
    let alpha = c.alpha;
    let e = alpha * c.hurst;
    let tt = c.t as f64;
    let mut out = Vec::with_capacity(c.d * (c.d + 1) / 2);
    for row in 0..c.d {
        for col in 0..row {
            let mut target = kpow * ((tt + row as f64).powf(e) - ((row - col) as f64).powf(e));
            for j in 0..col {
                let arj = c.get(row, j);
                target -= arj.abs().powf(alpha) - (arj - c.get(col, j)).abs().powf(alpha);
            }
            out.push((row, col, f(c.get(row, col), c.diag(col), alpha) - target));
        }
        let mut rhs = kpow * (tt + row as f64).powf(e);
        for j in 0..row {
            rhs -= c.get(row, j).abs().powf(alpha);
        }
        out.push((row, row, c.diag(row).abs().powf(alpha) - rhs));
    }
    out
}
