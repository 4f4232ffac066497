//! Linear fractional stable motion toolkit.
//!
//! Simulation, parameter estimation, codifference-matched triangular
//! decomposition into independent SαS innovations, one-step forecasting, and
//! the evaluation harnesses built on top of them.

pub mod decomposition;
pub mod error;
pub mod estimation;
pub mod evaluation;
pub mod forecast;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod stable;

pub use decomposition::{
    solve_coefficients, CoefficientCache, CoefficientSolver, DecompositionCoeffs,
    DecompositionError, SolveReport, SolverRegistry,
};
pub use error::{LfsmError, Result};
pub use estimation::{EstimationConfig, EstimationResult, RegressionFit};
pub use forecast::{ForecastMethod, ForecastResult, InnovationVector};

pub use model::{LfsmParams, SimConfig, TimeSeries};
pub use rng::RngState;
pub use stable::StableScale;
