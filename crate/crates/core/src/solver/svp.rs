use crate::error::Result;
use crate::linalg::{truncated_svd, DenseMatrix, TruncatedSvdOptions};
use crate::metrics::GroundTruth;
use crate::objectives::Objective;
use crate::solver::bfgd::{check_rank, diverged, TraceBuilder};
use crate::solver::trace::relative_change;
use crate::solver::{FactorPair, Init, SolveResult, SolverConfig, Termination};

/// Balanced split of the rank-`r` truncation of `x`, plus that truncation.
fn project(x: &DenseMatrix, r: usize) -> Result<(FactorPair, DenseMatrix)> {
    let svd = truncated_svd(x, r, TruncatedSvdOptions::default())?;
    let (u, v) = svd.balanced_factors();
    let pair = FactorPair::new(u, v)?;
    let xr = pair.product();
    Ok((pair, xr))
}

/// Singular value projection: `X⁺ = P_r(X − μ∇f(X))`, starting from zero
/// unless `cfg.init` provides a pair. `cfg.rank` and `cfg.regime` are ignored
/// in favour of `r`.
pub fn svp_solve<O: Objective + ?Sized>(
    obj: &O,
    r: usize,
    mu_step: f64,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
) -> Result<SolveResult> {
    cfg.validate()?;
    check_rank(obj, r)?;
    let (m, n) = obj.shape();
    let pair0 = match &cfg.init {
        Init::Provided(p) if p.shape() == (m, n) && p.rank() == r => p.clone(),
        Init::Provided(p) => {
            return Err(crate::error::dim_mismatch(
                "svp_solve: provided pair",
                format!("{m}x{n}, rank {r}"),
                format!("{}x{}, rank {}", p.shape().0, p.shape().1, p.rank()),
            ))
        }
        _ => FactorPair::zeros(m, n, r),
    };
    let mut pair = pair0;
    let mut x = pair.product();
    let (f0, mut g) = obj.value_and_grad(&x)?;
    let mut tb = TraceBuilder::new(truth, &pair)?;
    let initial_dist = tb.initial_dist();
    let mut termination = Termination::MaxIters;

    for iter in 1..=cfg.max_iters {
        let y = x.sub_scaled(mu_step, &g)?;
        if !y.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        let (next, x_next) = project(&y, r)?;
        let (f_next, g_next) = obj.value_and_grad(&x_next)?;
        let rel = relative_change(&x_next, &x);
        tb.push(iter, f_next, rel, &next)?;
        pair = next;
        x = x_next;
        g = g_next;
        if diverged(f_next, f0) {
            termination = Termination::Diverged;
            break;
        }
        if rel <= cfg.tol {
            termination = Termination::Tolerance;
            break;
        }
    }

    Ok(SolveResult {
        final_pair: pair,
        x_hat: x,
        trace: tb.trace,
        termination,
        step_size: mu_step,
        initial_f: f0,
        initial_dist,
        degenerate_init: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul_nt;
    use crate::metrics::relative_error;
    use crate::objectives::LeastSquaresSensing;
    use crate::operators::{LinearMap, MaskOperator, SensingMap};
    use crate::solver::DEFAULT_SVP_STEP;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_observation_converges_within_200_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = DenseMatrix::random_gaussian(20, 3, &mut rng);
        let b = DenseMatrix::random_gaussian(15, 3, &mut rng);
        let x_star = matmul_nt(&a, &b).unwrap();
        let map = SensingMap::from(MaskOperator::full(20, 15));
        let obj = LeastSquaresSensing::new(map.clone(), map.apply(&x_star).unwrap()).unwrap();
        let cfg = SolverConfig::new(3).with_max_iters(200).with_tol(1e-9);
        let res = svp_solve(&obj, 3, DEFAULT_SVP_STEP, &cfg, None).unwrap();
        assert!(res.trace.len() <= 200);
        let err = relative_error(&res.x_hat, &x_star).unwrap();
        assert!(err <= 1e-6, "relative error {err}");
    }

    #[test]
    fn zero_gradient_is_immediate_fixed_point() {
        let obj = LeastSquaresSensing::new(MaskOperator::full(4, 4).into(), vec![0.0; 16]).unwrap();
        let res = svp_solve(&obj, 2, DEFAULT_SVP_STEP, &SolverConfig::new(2), None).unwrap();
        assert_eq!(res.termination, Termination::Tolerance);
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.x_hat.max_abs(), 0.0);
    }
}
