use crate::error::{Error, Result};
use crate::linalg::{matmul, matmul_tn, DenseMatrix};
use crate::solver::FactorPair;

/// `λ·g(UᵀU − VᵀV)` with `g(M) = c‖M‖_F²`.
///
/// `g` is convex, minimized at `M = 0`, has symmetric gradient `2cM` on
/// symmetric input, and is `2c`-strongly convex and `2c`-smooth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceRegularizer {
    coefficient: f64,
    lambda: f64,
}

impl Default for BalanceRegularizer {
    fn default() -> Self {
        Self {
            coefficient: 1.0 / 16.0,
            lambda: 1.0,
        }
    }
}

impl BalanceRegularizer {
    pub fn new(coefficient: f64, lambda: f64) -> Result<Self> {
        if !(coefficient > 0.0 && coefficient.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "regularizer coefficient must be positive, got {coefficient}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            coefficient,
            lambda,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `g(M) = c‖M‖_F²` (without λ).
    pub fn g(&self, residual: &DenseMatrix) -> f64 {
        self.coefficient * residual.frobenius_norm_sq()
    }

    /// `∇g(M) = 2cM` (without λ).
    pub fn grad_g(&self, residual: &DenseMatrix) -> DenseMatrix {
        residual.scale(2.0 * self.coefficient)
    }

    /// Smoothness of `λ·g`.
    pub fn smoothness(&self) -> f64 {
        2.0 * self.coefficient * self.lambda
    }

    /// Strong-convexity modulus of `λ·g`.
    pub fn strong_convexity(&self) -> f64 {
        2.0 * self.coefficient * self.lambda
    }

    /// `λ·g(UᵀU − VᵀV)`.
    pub fn value(&self, pair: &FactorPair) -> Result<f64> {
        Ok(self.lambda * self.g(&balance_residual(pair)?))
    }

    /// `(4cλ·U·M, −4cλ·V·M)` with `M = UᵀU − VᵀV`.
    pub fn grad_factors(&self, pair: &FactorPair) -> Result<(DenseMatrix, DenseMatrix)> {
        let residual = balance_residual(pair)?;
        let k = 4.0 * self.coefficient * self.lambda;
        let gu = matmul(pair.u(), &residual)?.scale(k);
        let gv = matmul(pair.v(), &residual)?.scale(-k);
        Ok((gu, gv))
    }
}

/// `UᵀU − VᵀV`.
pub fn balance_residual(pair: &FactorPair) -> Result<DenseMatrix> {
    matmul_tn(pair.u(), pair.u())?.sub(&matmul_tn(pair.v(), pair.v())?)
}

/// Free-function form of [`BalanceRegularizer::grad_factors`].
pub fn reg_grad_factors(
    reg: &BalanceRegularizer,
    pair: &FactorPair,
) -> Result<(DenseMatrix, DenseMatrix)> {
    reg.grad_factors(pair)
}
