//! Convex objectives `f: ℝ^{m×n} → ℝ` with analytic gradients, plus the
//! balance regularizer on factor pairs.
//!
//! Gradient convention: least squares is `f(X) = ½‖y − A(X)‖²`, so
//! `∇f(X) = −A*(y − A(X))`.

mod onebit;
mod regularizer;
pub mod scalar;
mod sensing;

pub use onebit::{OneBitLogistic, OneBitProbit};
pub use regularizer::{balance_residual, reg_grad_factors, BalanceRegularizer};
pub use sensing::LeastSquaresSensing;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{matmul, matmul_tn, DenseMatrix};
use crate::solver::FactorPair;

/// Smoothness constant together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothness {
    pub value: f64,
    /// `false` when power iteration hit its cap and `value` is a fallback
    /// upper bound.
    pub converged: bool,
}

impl Smoothness {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            converged: true,
        }
    }
}

/// Value/gradient oracle for a convex, `L`-smooth function of a matrix.
pub trait Objective: Send + Sync {
    fn shape(&self) -> (usize, usize);

    fn value(&self, x: &DenseMatrix) -> Result<f64>;

    fn grad(&self, x: &DenseMatrix) -> Result<DenseMatrix>;

    fn value_and_grad(&self, x: &DenseMatrix) -> Result<(f64, DenseMatrix)> {
        Ok((self.value(x)?, self.grad(x)?))
    }

    fn smoothness(&self) -> Smoothness;

    /// Strong-convexity modulus, when the objective has one globally.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    fn check_point(&self, x: &DenseMatrix, op: &'static str) -> Result<()> {
        let (m, n) = self.shape();
        if x.shape() != (m, n) {
            return Err(dim_mismatch(
                op,
                format!("{m}x{n}"),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite(op));
        }
        Ok(())
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }
    fn value(&self, x: &DenseMatrix) -> Result<f64> {
        (**self).value(x)
    }
    fn grad(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        (**self).grad(x)
    }
    fn value_and_grad(&self, x: &DenseMatrix) -> Result<(f64, DenseMatrix)> {
        (**self).value_and_grad(x)
    }
    fn smoothness(&self) -> Smoothness {
        (**self).smoothness()
    }
    fn strong_convexity(&self) -> Option<f64> {
        (**self).strong_convexity()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }
    fn value(&self, x: &DenseMatrix) -> Result<f64> {
        (**self).value(x)
    }
    fn grad(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        (**self).grad(x)
    }
    fn value_and_grad(&self, x: &DenseMatrix) -> Result<(f64, DenseMatrix)> {
        (**self).value_and_grad(x)
    }
    fn smoothness(&self) -> Smoothness {
        (**self).smoothness()
    }
    fn strong_convexity(&self) -> Option<f64> {
        (**self).strong_convexity()
    }
}

/// `L` of the objective.
pub fn smoothness_constant<O: Objective + ?Sized>(obj: &O) -> f64 {
    obj.smoothness().value
}

/// Factor gradients `(∇f(UVᵀ)·V, ∇f(UVᵀ)ᵀ·U)`.
pub fn grad_factors<O: Objective + ?Sized>(
    obj: &O,
    pair: &FactorPair,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = obj.shape();
    if pair.u().rows() != m || pair.v().rows() != n {
        return Err(dim_mismatch(
            "grad_factors",
            format!("U: {m}xr, V: {n}xr"),
            format!("U: {}xr, V: {}xr", pair.u().rows(), pair.v().rows()),
        ));
    }
    let x = pair.product();
    let g = obj.grad(&x)?;
    factor_gradients_from(&g, pair)
}

pub(crate) fn factor_gradients_from(
    g: &DenseMatrix,
    pair: &FactorPair,
) -> Result<(DenseMatrix, DenseMatrix)> {
    Ok((matmul(g, pair.v())?, matmul_tn(g, pair.u())?))
}

#[cfg(test)]
pub(crate) fn product(u: &DenseMatrix, v: &DenseMatrix) -> DenseMatrix {
    crate::linalg::matmul_nt(u, v).expect("factor column counts agree")
}
