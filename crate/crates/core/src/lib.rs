//! Numerical toolkit for constructing, regularizing, and certifying unstable
//! compactly supported vortices of the two-dimensional Euler equations.
//!
//! The pipeline: find a piecewise-constant vortex with an unstable mode-n
//! eigenvalue (`vortex`), smooth it with a mollifier while preserving the
//! instability via a contraction scheme (`regularization`), certify the
//! result by residual evaluation and linearized time evolution (`verifier`),
//! and continue the unstable eigenvalue of the self-similar linearized
//! operator in the scaling strength b (`selfsimilar`). The `kernel` module
//! holds the mode-n Biot-Savart kernel shared by all of them.

pub mod error;
pub mod kernel;
pub mod quad;
pub mod regularization;
pub mod selfsimilar;
pub mod verifier;
pub mod vortex;

pub use error::{Error, Result};
