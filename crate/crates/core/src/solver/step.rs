//! Step-size rules and the per-iterate bounds used to audit them.

use crate::error::Result;
use crate::linalg::{spectral_norm, DenseMatrix, SPECTRAL_NORM_TOL};
use crate::objectives::Objective;
use crate::solver::FactorPair;

fn inverse_or_zero(denominator: f64) -> f64 {
    // Only an all-zero start makes this vanish, and such a start is a fixed
    // point of every update.
    if denominator > 0.0 {
        1.0 / denominator
    } else {
        0.0
    }
}

/// `η = 1 / (20·L·‖W₀‖₂² + 3·‖∇f(U₀V₀ᵀ)‖₂)`.
pub fn step_size_smooth<O: Objective + ?Sized>(pair0: &FactorPair, obj: &O) -> Result<f64> {
    let w_norm = spectral_norm(&pair0.stacked(), SPECTRAL_NORM_TOL);
    let g_norm = spectral_norm(&obj.grad(&pair0.product())?, SPECTRAL_NORM_TOL);
    let l = obj.smoothness().value;
    Ok(inverse_or_zero(20.0 * l * w_norm * w_norm + 3.0 * g_norm))
}

/// `η = 1 / (12·max{L, L_g}·‖W₀‖₂²)`.
pub fn step_size_strongcvx(pair0: &FactorPair, l: f64, l_g: f64) -> f64 {
    let w_norm = spectral_norm(&pair0.stacked(), SPECTRAL_NORM_TOL);
    inverse_or_zero(12.0 * l.max(l_g) * w_norm * w_norm)
}

/// Per-iterate bound `1 / (8·max{L, L_g}·‖W_t‖₂²)` for the regularized regime.
pub fn strongcvx_iterate_bound(w_t: &DenseMatrix, l_max: f64) -> f64 {
    let w = spectral_norm(w_t, SPECTRAL_NORM_TOL);
    inverse_or_zero(8.0 * l_max * w * w)
}

/// Per-iterate bound `1 / (15·L·‖W_t‖₂² + 3·‖∇f(U_tV_tᵀ)‖₂)` for the smooth
/// regime.
pub fn smooth_iterate_bound(w_t: &DenseMatrix, grad_t: &DenseMatrix, l: f64) -> f64 {
    let w = spectral_norm(w_t, SPECTRAL_NORM_TOL);
    let g = spectral_norm(grad_t, SPECTRAL_NORM_TOL);
    inverse_or_zero(15.0 * l * w * w + 3.0 * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd_small;
    use crate::objectives::LeastSquaresSensing;
    use crate::operators::{GaussianMap, LinearMap, MaskOperator, SensingMap};
    use crate::solver::random_init;

    /// Pair with `‖[U; V]‖₂ = scale`, representing `X₀ = 0`.
    fn pair_with_norm(scale: f64) -> FactorPair {
        let u = DenseMatrix::from_rows(&[&[scale], &[0.0]]).unwrap();
        FactorPair::new(u, DenseMatrix::zeros(3, 1)).unwrap()
    }

    #[test]
    fn smooth_plug_in() {
        // y = 0 so ∇f(0) = 0; completion has L = 1.
        let obj = LeastSquaresSensing::new(MaskOperator::full(2, 3).into(), vec![0.0; 6]).unwrap();
        let eta = step_size_smooth(&pair_with_norm(1.0), &obj).unwrap();
        assert!((eta - 1.0 / 20.0).abs() < 1e-12);
        let eta2 = step_size_smooth(&pair_with_norm(2.0), &obj).unwrap();
        assert!((eta2 - eta / 4.0).abs() < 1e-12);
    }

    #[test]
    fn strongcvx_plug_in() {
        let eta = step_size_strongcvx(&pair_with_norm(1.0), 1.0, 1.0);
        assert!((eta - 1.0 / 12.0).abs() < 1e-12);
        let eta2 = step_size_strongcvx(&pair_with_norm(1.0), 2.0, 0.5);
        assert!((eta2 - eta / 2.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_matches_independent_plug_in() {
        let map = SensingMap::from(GaussianMap::new(6, 5, 40, 1).unwrap());
        let y: Vec<f64> = (0..40).map(|k| (0.3 * k as f64).sin()).collect();
        let obj = LeastSquaresSensing::new(map.clone(), y).unwrap();
        let pair = random_init(6, 5, 2, 3).unwrap();
        let eta = step_size_smooth(&pair, &obj).unwrap();
        let w = svd_small(&pair.stacked()).unwrap().singulars[0];
        let g = svd_small(&obj.grad(&pair.product()).unwrap()).unwrap().singulars[0];
        let l = obj.smoothness().value;
        let oracle = 1.0 / (20.0 * l * w * w + 3.0 * g);
        assert!((eta - oracle).abs() <= 1e-6 * oracle, "{eta} vs {oracle}");
        let _ = map.num_measurements();
    }

    #[test]
    fn zero_start_is_degenerate_but_finite() {
        let obj = LeastSquaresSensing::new(MaskOperator::full(2, 2).into(), vec![0.0; 4]).unwrap();
        let z = FactorPair::zeros(2, 2, 1);
        assert_eq!(step_size_smooth(&z, &obj).unwrap(), 0.0);
        assert_eq!(step_size_strongcvx(&z, 1.0, 1.0), 0.0);
    }
}
