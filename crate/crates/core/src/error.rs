//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its accuracy target.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// No unstable window exists for the requested mode number.
    #[error("no unstable parameter found: {0}")]
    InstabilityNotFound(String),

    /// The fixed-point iteration stopped contracting.
    #[error("contraction failure after {iterations} iterations; last update norms {last_updates:?}")]
    ContractionFailure {
        iterations: usize,
        last_updates: Vec<f64>,
    },

    /// The regularized eigenvalue lost its positive imaginary part.
    #[error("instability lost: Im z = {im_z:.3e} at eps = {eps}")]
    InstabilityLost { eps: f64, im_z: f64 },

    /// A growth-rate fit could not be extracted from the evolution data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Eigenvalue continuation lost track of the branch.
    #[error("branch lost at b = {b}: nearest eigenvalue {nearest} at distance {distance:.3e} exceeds radius {radius:.3e}")]
    BranchLoss {
        b: f64,
        nearest: num_complex::Complex64,
        distance: f64,
        radius: f64,
    },

    /// A vector's length does not match the operator discretization.
    #[error("node mismatch: expected {expected} values, got {got}")]
    NodeMismatch { expected: usize, got: usize },
}
