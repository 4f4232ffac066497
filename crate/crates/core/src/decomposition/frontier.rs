use rayon::prelude::*;
use serde::Serialize;

use super::{SolverRegistry, DEFAULT_TOL};

/// Outcome of one `(α, H)` grid point of the existence scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierRow {
    pub alpha: f64,
    pub hurst: f64,
    pub exists: bool,
    /// `(row, col)` of the first equation that failed.
    pub failing_equation: Option<(usize, usize)>,
    pub reason: Option<String>,
}

/// Tries every `(α, H)` pair with `t` and dimension `d`; failures are data.
pub fn scan_existence_frontier(
    alpha_grid: &[f64],
    h_grid: &[f64],
    t: usize,
    d: usize,
) -> Vec<FrontierRow> {
    let registry = SolverRegistry::default();
    let pairs: Vec<(f64, f64)> = alpha_grid
        .iter()
        .flat_map(|&a| h_grid.iter().map(move |&h| (a, h)))
        .collect();
    pairs
        .par_iter()
        .map(|&(alpha, hurst)| {
            match registry.auto(alpha, hurst).solve(alpha, hurst, t, d, DEFAULT_TOL) {
                Ok(_) => FrontierRow {
                    alpha,
                    hurst,
                    exists: true,
                    failing_equation: None,
                    reason: None,
                },
                Err(e) => FrontierRow {
                    alpha,
                    hurst,
                    exists: false,
                    failing_equation: e.equation(),
                    reason: Some(e.to_string()),
                },
            }
        })
        .collect()
}
