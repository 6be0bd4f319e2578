use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{truncated_svd, DenseMatrix, TruncatedSvdOptions};
use crate::objectives::Objective;
use crate::solver::FactorPair;

#[derive(Debug, Clone)]
pub struct SpectralInit {
    pub pair: FactorPair,
    /// `∇f(0)` vanished; `pair` is all zeros.
    pub zero_gradient: bool,
}

/// Balanced split `(A₀Σ₀^{1/2}, B₀Σ₀^{1/2})` of the best rank-`r`
/// approximation of `X₀ = −(1/L)∇f(0)`.
pub fn spectral_init<O: Objective + ?Sized>(obj: &O, r: usize) -> Result<SpectralInit> {
    let (m, n) = obj.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::RankOutOfRange {
            rank: r,
            max: m.min(n),
        });
    }
    let g0 = obj.grad(&DenseMatrix::zeros(m, n))?;
    let l = obj.smoothness().value;
    if g0.max_abs() == 0.0 || !(l > 0.0) {
        return Ok(SpectralInit {
            pair: FactorPair::zeros(m, n, r),
            zero_gradient: true,
        });
    }
    let x0 = g0.scale(-1.0 / l);
    let svd = truncated_svd(&x0, r, TruncatedSvdOptions::default())?;
    let (u, v) = svd.balanced_factors();
    Ok(SpectralInit {
        pair: FactorPair::new(u, v)?,
        zero_gradient: false,
    })
}

/// Gaussian factors jointly rescaled so that `‖UVᵀ‖_F = 1`.
pub fn random_init(m: usize, n: usize, r: usize, seed: u64) -> Result<FactorPair> {
    if r == 0 || r > m.min(n) {
        return Err(Error::RankOutOfRange {
            rank: r,
            max: m.min(n),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = DenseMatrix::random_gaussian(m, r, &mut rng);
    let v = DenseMatrix::random_gaussian(n, r, &mut rng);
    let pair = FactorPair::new(u, v)?;
    let s = 1.0 / pair.product().frobenius_norm().sqrt();
    let (u, v) = pair.into_parts();
    FactorPair::new(u.scale(s), v.scale(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matmul_nt, matmul_tn};
    use crate::objectives::LeastSquaresSensing;
    use crate::operators::{LinearMap, MaskOperator, SensingMap};

    #[test]
    fn full_observation_recovers_low_rank_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DenseMatrix::random_gaussian(9, 2, &mut rng);
        let b = DenseMatrix::random_gaussian(7, 2, &mut rng);
        let x = matmul_nt(&a, &b).unwrap();
        let map = SensingMap::from(MaskOperator::full(9, 7));
        let obj = LeastSquaresSensing::new(map.clone(), map.apply(&x).unwrap()).unwrap();
        let init = spectral_init(&obj, 2).unwrap();
        assert!(!init.zero_gradient);
        let err = init.pair.product().sub(&x).unwrap().frobenius_norm();
        assert!(err <= 1e-8 * x.frobenius_norm());
        let bal = matmul_tn(init.pair.u(), init.pair.u())
            .unwrap()
            .sub(&matmul_tn(init.pair.v(), init.pair.v()).unwrap())
            .unwrap();
        assert!(bal.frobenius_norm() <= 1e-8);
    }

    #[test]
    fn zero_gradient_gives_zero_pair() {
        let obj = LeastSquaresSensing::new(MaskOperator::full(3, 4).into(), vec![0.0; 12]).unwrap();
        let init = spectral_init(&obj, 2).unwrap();
        assert!(init.zero_gradient);
        assert_eq!(init.pair.product().max_abs(), 0.0);
    }

    #[test]
    fn random_init_unit_norm_and_deterministic() {
        let a = random_init(6, 5, 2, 7).unwrap();
        let b = random_init(6, 5, 2, 7).unwrap();
        let c = random_init(6, 5, 2, 8).unwrap();
        assert!((a.product().frobenius_norm() - 1.0).abs() <= 1e-12);
        assert_eq!(a, b);
        assert!(a.stacked().sub(&c.stacked()).unwrap().frobenius_norm() > 1e-3);
    }

    #[test]
    fn rank_checked() {
        assert!(random_init(2, 3, 3, 0).is_err());
    }
}
