use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{DecompositionCoeffs, DecompositionError, SolverRegistry};

type Key = (u64, u64, usize, usize, u64);
type Entry = Result<Arc<DecompositionCoeffs>, DecompositionError>;

/// Thread-safe memo of solved coefficients keyed by `(α, H, t, d, tol)`.
///
/// Failures are cached too, so a backtest does not retry a point outside the
/// existence region on every window.
#[derive(Debug, Default)]
pub struct CoefficientCache {
    registry: SolverRegistry,
    entries: RwLock<HashMap<Key, Entry>>,
}

impl CoefficientCache {
    pub fn new(registry: SolverRegistry) -> Self {
        Self {
            registry,
            entries: RwLock::new(HashMap::new()),
        }
    }

    pub fn get_or_solve(
        &self,
        alpha: f64,
        hurst: f64,
        t: usize,
        d: usize,
        tol: f64,
    ) -> Result<Arc<DecompositionCoeffs>, DecompositionError> {
        let key = (alpha.to_bits(), hurst.to_bits(), t, d, tol.to_bits());
        if let Some(hit) = self.entries.read().expect("cache lock poisoned").get(&key) {
            return hit.clone();
        }
        let solved = self
            .registry
            .auto(alpha, hurst)
            .solve(alpha, hurst, t, d, tol)
            .map(|(c, _)| Arc::new(c));
        self.entries
            .write()
            .expect("cache lock poisoned")
            .entry(key)
            .or_insert(solved)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
