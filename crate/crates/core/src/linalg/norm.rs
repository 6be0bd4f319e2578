use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{matvec, matvec_t, DenseMatrix};

pub const SPECTRAL_NORM_TOL: f64 = 1e-6;
pub const SPECTRAL_NORM_MAX_ITERS: usize = 500;
const START_SEED: u64 = 0x00c0_ffee;

/// Outcome of a power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power-iteration estimate of σ₁(a) to relative tolerance `tol`.
pub fn spectral_norm(a: &DenseMatrix, tol: f64) -> f64 {
    spectral_norm_estimate(a, tol).value
}

pub fn spectral_norm_estimate(a: &DenseMatrix, tol: f64) -> PowerEstimate {
    if a.max_abs() == 0.0 || a.rows() == 0 || a.cols() == 0 {
        return PowerEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    // Iterate on the Gram matrix of the smaller side.
    let tall = a.cols() <= a.rows();
    let dim = if tall { a.cols() } else { a.rows() };
    let gram_apply = |v: &[f64]| -> (Vec<f64>, f64) {
        if tall {
            let av = matvec(a, v).expect("dims");
            let nrm = norm2(&av);
            (matvec_t(a, &av).expect("dims"), nrm)
        } else {
            let atv = matvec_t(a, v).expect("dims");
            let nrm = norm2(&atv);
            (matvec(a, &atv).expect("dims"), nrm)
        }
    };
    power_iterate(dim, gram_apply, tol, SPECTRAL_NORM_MAX_ITERS)
}

/// Generic power iteration for a PSD operator `v ↦ Bv` given as a closure
/// that returns `(Bv, sqrt(vᵀBv))` for unit `v`. The reported value is the
/// square root of the Rayleigh quotient.
pub(crate) fn power_iterate(
    dim: usize,
    mut apply: impl FnMut(&[f64]) -> (Vec<f64>, f64),
    tol: f64,
    max_iters: usize,
) -> PowerEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut v);
    let mut prev = f64::NAN;
    for it in 1..=max_iters {
        let (mut w, est) = apply(&v);
        if (est - prev).abs() <= tol * est {
            return PowerEstimate {
                value: est,
                iterations: it,
                converged: true,
            };
        }
        prev = est;
        if normalize(&mut w) == 0.0 {
            return PowerEstimate {
                value: est,
                iterations: it,
                converged: true,
            };
        }
        v = w;
    }
    PowerEstimate {
        value: prev,
        iterations: max_iters,
        converged: false,
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}
