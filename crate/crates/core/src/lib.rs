//! Riccati-diffusion explosion counting for the stochastic Airy and Hill operators.
//!
//! The eigenvalues of a one-dimensional random Schrödinger operator below a level
//! are counted by the blow-ups of the associated Riccati diffusion. This crate
//! simulates those diffusions, evaluates the stationary-well integrals that govern
//! their explosion rates, maps everything to the small-β edge scaling, and samples
//! tridiagonal β-ensembles for comparison.

pub mod airy;
pub mod error;
pub mod point_process;
pub mod quad;
pub mod riccati;
pub mod rng;
pub mod stationary;
pub mod stats;
pub mod tridiag;

pub use error::{Error, Result};
pub use point_process::EmpiricalPointProcess;
pub use quad::{QuadratureConfig, QuadratureResult};
pub use riccati::{DiffusionParams, ExplosionLog, NumericsConfig, PathSample};
pub use tridiag::{EnsembleParams, TridiagMatrix};
