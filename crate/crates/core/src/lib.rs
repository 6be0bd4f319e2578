//! Bi-factored gradient descent (BFGD) for problems of the form
//! `minimize f(U Vᵀ)` over rectangular factors.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense matrices, QR, SVD and spectral norms.
//! - [`operators`]: linear sensing maps with adjoints.
//! - [`objectives`]: least squares, 1-bit logistic/probit and the balance
//!   regularizer.
//! - [`solver`]: BFGD in the smooth and regularized regimes, spectral
//!   initialization, step sizes and an SVP baseline.
//! - [`metrics`]: Procrustes distance to the balanced optimum and recovery
//!   metrics.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod objectives;
pub mod operators;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
