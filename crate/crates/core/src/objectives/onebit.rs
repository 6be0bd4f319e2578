use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::DenseMatrix;
use crate::objectives::scalar::{inverse_mills, log_normal_cdf, log_sigmoid, sigmoid};
use crate::objectives::{Objective, Smoothness};
use crate::operators::{LinearMap, MaskOperator};

fn check_labels(mask: &MaskOperator, labels: &[f64]) -> Result<()> {
    if labels.len() != mask.len() {
        return Err(dim_mismatch("1-bit labels", mask.len(), labels.len()));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidArgument("labels must be +1 or -1".into()));
    }
    Ok(())
}

/// Negative log-likelihood of ±1 observations under the logistic link,
/// `f(X) = −Σ_{Ω} log σ(Y_ij X_ij)`.
#[derive(Debug, Clone)]
pub struct OneBitLogistic {
    mask: MaskOperator,
    labels: Vec<f64>,
}

impl OneBitLogistic {
    /// `labels[k]` belongs to `mask.indices()[k]`.
    pub fn new(mask: MaskOperator, labels: Vec<f64>) -> Result<Self> {
        check_labels(&mask, &labels)?;
        Ok(Self { mask, labels })
    }

    pub fn mask(&self) -> &MaskOperator {
        &self.mask
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

impl Objective for OneBitLogistic {
    fn shape(&self) -> (usize, usize) {
        self.mask.shape()
    }

    fn value(&self, x: &DenseMatrix) -> Result<f64> {
        self.check_point(x, "OneBitLogistic::value")?;
        Ok(self
            .mask
            .indices()
            .iter()
            .zip(&self.labels)
            .map(|(&(i, j), &y)| -log_sigmoid(y * x.get(i, j)))
            .sum())
    }

    fn grad(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_point(x, "OneBitLogistic::grad")?;
        let (m, n) = self.shape();
        let mut g = DenseMatrix::zeros(m, n);
        for (&(i, j), &y) in self.mask.indices().iter().zip(&self.labels) {
            let observed_plus = if y > 0.0 { 1.0 } else { 0.0 };
            g.set(i, j, sigmoid(x.get(i, j)) - observed_plus);
        }
        Ok(g)
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::exact(0.25)
    }
}

/// Negative log-likelihood under the probit link
/// `P[Y = +1] = Φ(X / noise_sigma)`.
#[derive(Debug, Clone)]
pub struct OneBitProbit {
    mask: MaskOperator,
    labels: Vec<f64>,
    noise_sigma: f64,
}

impl OneBitProbit {
    pub fn new(mask: MaskOperator, labels: Vec<f64>, noise_sigma: f64) -> Result<Self> {
        check_labels(&mask, &labels)?;
        if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise_sigma must be positive, got {noise_sigma}"
            )));
        }
        Ok(Self {
            mask,
            labels,
            noise_sigma,
        })
    }

    pub fn mask(&self) -> &MaskOperator {
        &self.mask
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }
}

impl Objective for OneBitProbit {
    fn shape(&self) -> (usize, usize) {
        self.mask.shape()
    }

    fn value(&self, x: &DenseMatrix) -> Result<f64> {
        self.check_point(x, "OneBitProbit::value")?;
        let s = self.noise_sigma;
        Ok(self
            .mask
            .indices()
            .iter()
            .zip(&self.labels)
            .map(|(&(i, j), &y)| -log_normal_cdf(y * x.get(i, j) / s))
            .sum())
    }

    fn grad(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_point(x, "OneBitProbit::grad")?;
        let (m, n) = self.shape();
        let s = self.noise_sigma;
        let mut g = DenseMatrix::zeros(m, n);
        for (&(i, j), &y) in self.mask.indices().iter().zip(&self.labels) {
            let z = y * x.get(i, j) / s;
            g.set(i, j, -(y / s) * inverse_mills(z));
        }
        Ok(g)
    }

    /// `d²/dz²[−log Φ(z)] ≤ 1`, so the constant is `1/σ²`.
    fn smoothness(&self) -> Smoothness {
        Smoothness::exact(1.0 / (self.noise_sigma * self.noise_sigma))
    }
}
