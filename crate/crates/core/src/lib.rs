//! Spectral gradient stepsizes interpolating between the long and short
//! Barzilai-Borwein steps, strictly convex quadratic test problems, a
//! gradient-method driver, and convergence diagnostics.

pub mod analysis;
pub mod error;
pub mod gamma;
pub mod linalg;
pub mod problem;
pub mod rng;
pub mod solver;
pub mod stepsize;

pub use error::{Error, Result};
pub use problem::{QuadraticProblem, SpectrumKind};
pub use solver::{run_gradient_method, MethodId, RunConfig, RunTrace, Termination};
pub use stepsize::{GradientPair, PairProducts, StepInterval};
