//! Linear sensing maps `A: ℝ^{m×n} → ℝ^p` with exact adjoints.

mod gaussian;
mod mask;
mod structured;

pub use gaussian::GaussianMap;
pub use mask::{MaskOperator, MaskParseError};
pub use structured::StructuredMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{matmul_nt, DenseMatrix};

/// A linear map from `m×n` matrices to `p`-vectors, together with its adjoint
/// under the Frobenius / Euclidean inner products.
pub trait LinearMap: Send + Sync {
    /// `(m, n)` of the input matrices.
    fn shape(&self) -> (usize, usize);

    /// Output length `p`.
    fn num_measurements(&self) -> usize;

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>>;

    fn adjoint(&self, y: &[f64]) -> Result<DenseMatrix>;

    /// A cheap upper bound on `‖A‖₂²`.
    fn norm_sq_upper_bound(&self) -> f64;

    fn check_input(&self, x: &DenseMatrix) -> Result<()> {
        if x.shape() != self.shape() {
            let (m, n) = self.shape();
            return Err(dim_mismatch(
                "LinearMap::apply",
                format!("{m}x{n}"),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("LinearMap::apply"));
        }
        Ok(())
    }

    fn check_measurements(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.num_measurements() {
            return Err(dim_mismatch(
                "LinearMap::adjoint",
                self.num_measurements(),
                y.len(),
            ));
        }
        Ok(())
    }
}

/// The concrete maps shipped with the crate.
#[derive(Debug, Clone)]
pub enum SensingMap {
    Gaussian(GaussianMap),
    Mask(MaskOperator),
    Structured(StructuredMap),
}

impl SensingMap {
    pub fn as_mask(&self) -> Option<&MaskOperator> {
        match self {
            SensingMap::Mask(m) => Some(m),
            _ => None,
        }
    }

    fn inner(&self) -> &dyn LinearMap {
        match self {
            SensingMap::Gaussian(g) => g,
            SensingMap::Mask(m) => m,
            SensingMap::Structured(s) => s,
        }
    }
}

impl LinearMap for SensingMap {
    fn shape(&self) -> (usize, usize) {
        self.inner().shape()
    }

    fn num_measurements(&self) -> usize {
        self.inner().num_measurements()
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.inner().apply(x)
    }

    fn adjoint(&self, y: &[f64]) -> Result<DenseMatrix> {
        self.inner().adjoint(y)
    }

    fn norm_sq_upper_bound(&self) -> f64 {
        self.inner().norm_sq_upper_bound()
    }
}

impl From<GaussianMap> for SensingMap {
    fn from(g: GaussianMap) -> Self {
        SensingMap::Gaussian(g)
    }
}

impl From<MaskOperator> for SensingMap {
    fn from(m: MaskOperator) -> Self {
        SensingMap::Mask(m)
    }
}

impl From<StructuredMap> for SensingMap {
    fn from(s: StructuredMap) -> Self {
        SensingMap::Structured(s)
    }
}

/// Empirical restricted-isometry bracket.
///
/// Over `trials` random rank-`r` matrices of unit Frobenius norm the observed
/// ratios `‖A(X)‖²` satisfy `1 - delta_low ≤ ratio ≤ 1 + delta_high`. This is
/// a sampled diagnostic, not a certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipEstimate {
    pub delta_low: f64,
    pub delta_high: f64,
}

impl RipEstimate {
    /// Restricted condition number `(1 + δ_high) / (1 - δ_low)`; infinite when
    /// the lower side collapses.
    pub fn condition_number(&self) -> f64 {
        let lo = 1.0 - self.delta_low;
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            (1.0 + self.delta_high) / lo
        }
    }
}

pub fn estimate_rip<A: LinearMap + ?Sized>(
    map: &A,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (m, n) = map.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::RankOutOfRange {
            rank: r,
            max: m.min(n),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..trials {
        let a = DenseMatrix::random_gaussian(m, r, &mut rng);
        let b = DenseMatrix::random_gaussian(n, r, &mut rng);
        let x = matmul_nt(&a, &b)?;
        let x = x.scale(1.0 / x.frobenius_norm());
        let ratio: f64 = map.apply(&x)?.iter().map(|v| v * v).sum();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(RipEstimate {
        delta_low: 1.0 - lo,
        delta_high: hi - 1.0,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mask_is_isometry() {
        let mask = MaskOperator::full(5, 4);
        let est = estimate_rip(&mask, 2, 20, 1).unwrap();
        assert!(est.delta_high <= 1e-12);
        assert!(est.delta_low <= 1e-12);
    }

    #[test]
    fn gaussian_rip_bracket() {
        let (m, n, r) = (16, 16, 2);
        let g = GaussianMap::new(m, n, 10 * n * r, 4).unwrap();
        let est = estimate_rip(&g, r, 50, 99).unwrap();
        assert!(est.delta_high <= 0.5, "{est:?}");
        assert!(est.delta_low <= 0.5, "{est:?}");
    }

    #[test]
    fn single_measurement_is_far_from_isometry() {
        let g = GaussianMap::new(16, 16, 1, 4).unwrap();
        let est = estimate_rip(&g, 2, 50, 99).unwrap();
        assert!(est.delta_high >= 0.9, "{est:?}");
    }

    #[test]
    fn rejects_zero_trials() {
        let mask = MaskOperator::full(3, 3);
        assert!(estimate_rip(&mask, 1, 0, 0).is_err());
    }
}
