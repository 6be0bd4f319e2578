//! Synthetic problem instances.

use bfgd_core::linalg::{matmul_nt, DenseMatrix};
use bfgd_core::metrics::GroundTruth;
use bfgd_core::objectives::scalar::{normal_cdf, sigmoid};
use bfgd_core::objectives::{LeastSquaresSensing, Objective, OneBitLogistic, OneBitProbit};
use bfgd_core::operators::{GaussianMap, LinearMap, MaskOperator, SensingMap, StructuredMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Link, MapKind};
use crate::error::Result;

pub struct SensingInstance {
    pub obj: LeastSquaresSensing,
    pub truth: GroundTruth,
    /// `p > m·n`: more measurements than unknowns.
    pub oversampled: bool,
}

pub struct OneBitInstance {
    pub obj: Box<dyn Objective>,
    pub truth: GroundTruth,
    pub mask: MaskOperator,
    /// Labels on `mask.indices()`, in order.
    pub labels: Vec<f64>,
    /// Every unobserved entry, labelled with the sign of `X*`.
    pub test_set: Vec<(usize, usize, f64)>,
}

/// Gaussian factors with `‖U*V*ᵀ‖_F = 1`.
fn unit_low_rank(m: usize, n: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<DenseMatrix> {
    let u = DenseMatrix::random_gaussian(m, r, rng);
    let v = DenseMatrix::random_gaussian(n, r, rng);
    let x = matmul_nt(&u, &v)?;
    let s = 1.0 / x.frobenius_norm();
    Ok(x.scale(s))
}

/// `round(fraction · m·n)`, at least one entry.
pub fn observed_count(m: usize, n: usize, fraction: f64) -> usize {
    ((fraction * (m * n) as f64).round() as usize).clamp(1, m * n)
}

/// Noiseless sensing of a unit-norm rank-`r` matrix with `p = round(C·n·r)`
/// measurements.
pub fn gen_sensing_instance(
    m: usize,
    n: usize,
    r: usize,
    sample_factor: f64,
    map_kind: MapKind,
    seed: u64,
) -> Result<SensingInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_star = unit_low_rank(m, n, r, &mut rng)?;
    let p = ((sample_factor * (n * r) as f64).round() as usize).max(1);
    let map_seed = rng.random::<u64>();
    let map = match map_kind {
        MapKind::Gaussian => SensingMap::from(GaussianMap::new(m, n, p, map_seed)?),
        MapKind::Structured => SensingMap::from(StructuredMap::new(m, n, p, map_seed)?),
    };
    let y = map.apply(&x_star)?;
    Ok(SensingInstance {
        obj: LeastSquaresSensing::new(map, y)?,
        truth: GroundTruth::from_matrix(x_star, r)?,
        oversampled: p > m * n,
    })
}

/// Entries of a unit-norm rank-`r` matrix observed on a uniform random mask.
pub fn gen_completion_instance(m: usize, n: usize, r: usize, fraction: f64, seed: u64) -> Result<SensingInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_star = unit_low_rank(m, n, r, &mut rng)?;
    let mask = MaskOperator::sample(m, n, observed_count(m, n, fraction), &mut rng)?;
    let map = SensingMap::from(mask);
    let y = map.apply(&x_star)?;
    Ok(SensingInstance {
        obj: LeastSquaresSensing::new(map, y)?,
        truth: GroundTruth::from_matrix(x_star, r)?,
        oversampled: false,
    })
}

/// `P(label = +1)` at `x` under `link`.
pub fn link_probability(link: Link, x: f64, noise_sigma: f64) -> f64 {
    match link {
        Link::Logistic => sigmoid(x),
        Link::Probit => normal_cdf(x / noise_sigma),
    }
}

/// Draw a ±1 label with `P(+1) = prob`.
pub fn draw_label<R: Rng + ?Sized>(prob: f64, rng: &mut R) -> f64 {
    if rng.random::<f64>() < prob {
        1.0
    } else {
        -1.0
    }
}

/// 1-bit observations of a rank-`r` matrix with uniform factors, scaled so
/// that `‖X*‖_∞ = alpha`.
#[allow(clippy::too_many_arguments)]
pub fn gen_onebit_instance(
    m: usize,
    n: usize,
    r: usize,
    omega_fraction: f64,
    link: Link,
    noise_sigma: f64,
    alpha: f64,
    seed: u64,
) -> Result<OneBitInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = DenseMatrix::random_uniform(m, r, -0.5, 0.5, &mut rng);
    let v = DenseMatrix::random_uniform(n, r, -0.5, 0.5, &mut rng);
    let x = matmul_nt(&u, &v)?;
    let x_star = x.scale(alpha / x.max_abs());

    let mask = MaskOperator::sample(m, n, observed_count(m, n, omega_fraction), &mut rng)?;
    let labels: Vec<f64> = mask
        .indices()
        .iter()
        .map(|&(i, j)| draw_label(link_probability(link, x_star.get(i, j), noise_sigma), &mut rng))
        .collect();
    let test_set = mask
        .complement()
        .into_iter()
        .map(|(i, j)| (i, j, if x_star.get(i, j) >= 0.0 { 1.0 } else { -1.0 }))
        .collect();
    let obj: Box<dyn Objective> = match link {
        Link::Logistic => Box::new(OneBitLogistic::new(mask.clone(), labels.clone())?),
        Link::Probit => Box::new(OneBitProbit::new(mask.clone(), labels.clone(), noise_sigma)?),
    };
    Ok(OneBitInstance {
        obj,
        truth: GroundTruth::from_matrix(x_star, r)?,
        mask,
        labels,
        test_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sensing_truth_is_unit_rank_r_and_realizable() {
        let inst = gen_sensing_instance(12, 10, 2, 3.0, MapKind::Gaussian, 5).unwrap();
        let x = inst.truth.x_star();
        assert!((x.frobenius_norm() - 1.0).abs() <= 1e-12);
        let s = bfgd_core::linalg::svd_small(x).unwrap().singulars;
        assert!(s[1] > 1e-3 && s[2] <= 1e-12);
        assert_eq!(inst.obj.value(x).unwrap(), 0.0);
        assert_eq!(inst.obj.map().num_measurements(), 60);
    }

    #[test]
    fn sensing_reproducible() {
        let a = gen_sensing_instance(8, 8, 1, 4.0, MapKind::Structured, 3).unwrap();
        let b = gen_sensing_instance(8, 8, 1, 4.0, MapKind::Structured, 3).unwrap();
        assert_eq!(a.obj.observations(), b.obj.observations());
        let c = gen_sensing_instance(8, 8, 1, 4.0, MapKind::Structured, 4).unwrap();
        assert_ne!(a.obj.observations(), c.obj.observations());
    }

    #[test]
    fn completion_mask_size() {
        let inst = gen_completion_instance(10, 9, 2, 0.4, 1).unwrap();
        let mask = inst.obj.map().as_mask().unwrap();
        assert_eq!(mask.len(), 36);
        assert_eq!(inst.obj.value(inst.truth.x_star()).unwrap(), 0.0);
    }

    #[test]
    fn onebit_alpha_and_split() {
        let inst = gen_onebit_instance(20, 15, 2, 0.25, Link::Probit, 0.3, 2.5, 9).unwrap();
        assert!((inst.truth.x_star().max_abs() - 2.5).abs() <= 1e-12);
        assert_eq!(inst.mask.len(), 75);
        assert_eq!(inst.test_set.len(), 300 - 75);
        assert!(inst.test_set.iter().all(|&(i, j, _)| !inst.mask.contains(i, j)));
        assert!(inst.labels.iter().all(|&l| l == 1.0 || l == -1.0));
    }

    #[test]
    fn fair_coin_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let p = link_probability(Link::Logistic, 0.0, 1.0);
        let pos = (0..10_000).filter(|_| draw_label(p, &mut rng) > 0.0).count();
        let freq = pos as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.02, "{freq}");
        assert_eq!(link_probability(Link::Probit, 0.0, 0.244), 0.5);
    }
}
