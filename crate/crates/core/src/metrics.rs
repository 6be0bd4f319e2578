//! Distance to the balanced optimum and recovery metrics.

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{matmul, matmul_tn, svd_small, truncated_svd, DenseMatrix, TruncatedSvdOptions};
use crate::solver::FactorPair;

/// A reference matrix together with its balanced rank-`r` factorization
/// `U* = A*Σ*^{1/2}`, `V* = B*Σ*^{1/2}`.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    x_star: DenseMatrix,
    rank: usize,
    balanced: FactorPair,
    projected: DenseMatrix,
}

impl GroundTruth {
    pub fn from_matrix(x_star: DenseMatrix, r: usize) -> Result<Self> {
        let svd = truncated_svd(&x_star, r, TruncatedSvdOptions::default())?;
        let (u, v) = svd.balanced_factors();
        let balanced = FactorPair::new(u, v)?;
        let projected = balanced.product();
        Ok(Self {
            x_star,
            rank: r,
            balanced,
            projected,
        })
    }

    pub fn x_star(&self) -> &DenseMatrix {
        &self.x_star
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn balanced(&self) -> &FactorPair {
        &self.balanced
    }

    /// `P_r(X*) = U*V*ᵀ`.
    pub fn projected(&self) -> &DenseMatrix {
        &self.projected
    }

    /// `‖X* − P_r(X*)‖_F`.
    pub fn tail_norm(&self) -> f64 {
        self.x_star.sub(&self.projected).expect("same shape").frobenius_norm()
    }
}

/// `min_R ‖[U; V] − [U*; V*]R‖_F` over orthogonal `R`, solved in closed form.
pub fn procrustes_dist(pair: &FactorPair, truth: &GroundTruth) -> Result<f64> {
    if pair.rank() != truth.rank || pair.shape() != truth.x_star.shape() {
        let (m, n) = truth.x_star.shape();
        let (pm, pn) = pair.shape();
        return Err(dim_mismatch(
            "procrustes_dist",
            format!("{m}x{n}, rank {}", truth.rank),
            format!("{pm}x{pn}, rank {}", pair.rank()),
        ));
    }
    let w = pair.stacked();
    let w_star = truth.balanced.stacked();
    let rot = procrustes_rotation(&w_star, &w)?;
    Ok(w.sub(&matmul(&w_star, &rot)?)?.frobenius_norm())
}

/// Orthogonal `R` maximizing `tr(Rᵀ·aᵀb)`.
fn procrustes_rotation(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let svd = svd_small(&matmul_tn(a, b)?)?;
    crate::linalg::matmul_nt(&svd.left, &svd.right)
}

/// `‖x_hat − x_star‖_F / ‖x_star‖_F`.
pub fn relative_error(x_hat: &DenseMatrix, x_star: &DenseMatrix) -> Result<f64> {
    let denom = x_star.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::InvalidArgument("relative_error: reference is zero".into()));
    }
    Ok(x_hat.sub(x_star)?.frobenius_norm() / denom)
}

/// Fraction of `(i, j, label)` entries whose sign matches `x_hat`. Zero counts
/// as positive.
pub fn sign_accuracy(x_hat: &DenseMatrix, test_set: &[(usize, usize, f64)]) -> Result<f64> {
    if test_set.is_empty() {
        return Err(Error::InvalidArgument("sign_accuracy: empty test set".into()));
    }
    let (m, n) = x_hat.shape();
    let mut hits = 0usize;
    for &(i, j, label) in test_set {
        if i >= m || j >= n {
            return Err(Error::InvalidArgument(format!("sign_accuracy: entry ({i}, {j}) outside {m}x{n}")));
        }
        let predicted = if x_hat.get(i, j) >= 0.0 { 1.0 } else { -1.0 };
        let truth = if label >= 0.0 { 1.0 } else { -1.0 };
        if predicted == truth {
            hits += 1;
        }
    }
    Ok(hits as f64 / test_set.len() as f64)
}

/// Peak signal-to-noise ratio in dB; `+∞` when the inputs agree exactly.
pub fn psnr(x_hat: &DenseMatrix, reference: &DenseMatrix, peak: f64) -> Result<f64> {
    if !(peak > 0.0) {
        return Err(Error::InvalidArgument(format!("psnr: peak must be positive, got {peak}")));
    }
    let mse = x_hat.sub(reference)?.frobenius_norm_sq() / (reference.rows() * reference.cols()) as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// `σ₁(u) / σ_r(u)` from the eigenvalues of `uᵀu`; `+∞` if `u` is rank
/// deficient.
pub fn condition_ratio(u: &DenseMatrix) -> Result<f64> {
    let gram = matmul_tn(u, u)?;
    let s = svd_small(&gram)?.singulars;
    let hi = s.first().copied().unwrap_or(0.0);
    let lo = s.last().copied().unwrap_or(0.0);
    if lo <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((hi / lo).sqrt())
}
