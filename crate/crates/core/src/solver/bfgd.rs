use std::time::Instant;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::DenseMatrix;
use crate::metrics::{procrustes_dist, GroundTruth};
use crate::objectives::{factor_gradients_from, BalanceRegularizer, Objective};
use crate::solver::trace::relative_change;
use crate::solver::{
    random_init, spectral_init, step_size_smooth, step_size_strongcvx, FactorPair, Init, Regime,
    SolveResult, SolveTrace, SolverConfig, Termination, TraceRecord,
};

/// f values beyond this multiple of the initial value count as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// What an observer sees after each accepted step.
#[derive(Debug)]
pub struct IterationEvent<'a> {
    pub iter: usize,
    pub prev: &'a FactorPair,
    pub next: &'a FactorPair,
    /// `∇f(U_tV_tᵀ)` at `prev`.
    pub grad_prev: &'a DenseMatrix,
    /// `‖∇f·V‖_F² + ‖∇fᵀ·U‖_F²` at `prev`, excluding the regularizer.
    pub factor_grad_norm_sq: f64,
    pub f_prev: f64,
    pub f_next: f64,
    pub eta: f64,
}

/// One update from `pair` given `g = ∇f(UVᵀ)`. Returns the new pair (which
/// may hold non-finite entries) and the squared norm of the f-part of the
/// factor gradient.
pub(crate) fn step_from_grad(
    pair: &FactorPair,
    g: &DenseMatrix,
    reg: Option<&BalanceRegularizer>,
    eta: f64,
) -> Result<(DenseMatrix, DenseMatrix, f64)> {
    let (mut gu, mut gv) = factor_gradients_from(g, pair)?;
    let norm_sq = gu.frobenius_norm_sq() + gv.frobenius_norm_sq();
    if let Some(reg) = reg {
        let (ru, rv) = reg.grad_factors(pair)?;
        gu = gu.add(&ru)?;
        gv = gv.add(&rv)?;
    }
    Ok((pair.u().sub_scaled(eta, &gu)?, pair.v().sub_scaled(eta, &gv)?, norm_sq))
}

/// A single BFGD update. With `reg = None` this is the smooth-regime step.
pub fn bfgd_step<O: Objective + ?Sized>(
    obj: &O,
    reg: Option<&BalanceRegularizer>,
    pair: &FactorPair,
    eta: f64,
) -> Result<FactorPair> {
    check_pair_shape(obj, pair, "bfgd_step")?;
    let g = obj.grad(&pair.product())?;
    let (u, v, _) = step_from_grad(pair, &g, reg, eta)?;
    FactorPair::new(u, v)
}

fn check_pair_shape<O: Objective + ?Sized>(obj: &O, pair: &FactorPair, op: &'static str) -> Result<()> {
    if pair.shape() != obj.shape() {
        let (m, n) = obj.shape();
        let (pm, pn) = pair.shape();
        return Err(dim_mismatch(op, format!("{m}x{n}"), format!("{pm}x{pn}")));
    }
    Ok(())
}

pub(crate) fn initial_pair<O: Objective + ?Sized>(obj: &O, cfg: &SolverConfig) -> Result<(FactorPair, bool)> {
    let (m, n) = obj.shape();
    let pair = match &cfg.init {
        Init::Spectral => {
            let init = spectral_init(obj, cfg.rank)?;
            return Ok((init.pair, init.zero_gradient));
        }
        Init::Random(seed) => random_init(m, n, cfg.rank, *seed)?,
        Init::Provided(p) => {
            check_pair_shape(obj, p, "bfgd_solve")?;
            if p.rank() != cfg.rank {
                return Err(dim_mismatch("bfgd_solve: provided rank", cfg.rank, p.rank()));
            }
            p.clone()
        }
    };
    Ok((pair, false))
}

pub(crate) fn check_rank<O: Objective + ?Sized>(obj: &O, r: usize) -> Result<()> {
    let (m, n) = obj.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::RankOutOfRange {
            rank: r,
            max: m.min(n),
        });
    }
    Ok(())
}

pub(crate) fn diverged(f: f64, f0: f64) -> bool {
    !f.is_finite() || (f0 > 0.0 && f > DIVERGENCE_FACTOR * f0)
}

/// Bookkeeping shared by the factored and projected solvers.
pub(crate) struct TraceBuilder<'a> {
    truth: Option<&'a GroundTruth>,
    start: Instant,
    prev_dist: Option<f64>,
    pub trace: SolveTrace,
}

impl<'a> TraceBuilder<'a> {
    pub fn new(truth: Option<&'a GroundTruth>, pair0: &FactorPair) -> Result<Self> {
        let prev_dist = truth.map(|t| procrustes_dist(pair0, t)).transpose()?;
        Ok(Self {
            truth,
            start: Instant::now(),
            prev_dist,
            trace: SolveTrace::default(),
        })
    }

    pub fn initial_dist(&self) -> Option<f64> {
        self.prev_dist
    }

    pub fn push(&mut self, iter: usize, f_value: f64, rel_change: f64, pair: &FactorPair) -> Result<()> {
        let dist = self.truth.map(|t| procrustes_dist(pair, t)).transpose()?;
        let contraction = match (dist, self.prev_dist) {
            (Some(d), Some(p)) if p > 0.0 => Some((d * d) / (p * p)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        self.prev_dist = dist;
        let balance = crate::objectives::balance_residual(pair)?.frobenius_norm();
        self.trace.records.push(TraceRecord {
            iter,
            f_value,
            rel_change,
            dist_to_truth: dist,
            contraction,
            balance_residual: balance,
            elapsed: self.start.elapsed().as_secs_f64(),
        });
        Ok(())
    }
}

/// Run BFGD. The strongly-convex regime requires `reg`; the smooth regime
/// ignores it.
pub fn bfgd_solve<O: Objective + ?Sized>(
    obj: &O,
    reg: Option<&BalanceRegularizer>,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
) -> Result<SolveResult> {
    bfgd_solve_with_observer(obj, reg, cfg, truth, |_| {})
}

/// [`bfgd_solve`] with a callback invoked after every accepted step.
pub fn bfgd_solve_with_observer<O, F>(
    obj: &O,
    reg: Option<&BalanceRegularizer>,
    cfg: &SolverConfig,
    truth: Option<&GroundTruth>,
    mut observer: F,
) -> Result<SolveResult>
where
    O: Objective + ?Sized,
    F: FnMut(&IterationEvent<'_>),
{
    cfg.validate()?;
    check_rank(obj, cfg.rank)?;
    let reg = match cfg.regime {
        Regime::Smooth => None,
        Regime::StronglyConvex => Some(reg.ok_or_else(|| {
            Error::InvalidArgument("strongly-convex regime needs a balance regularizer".into())
        })?),
    };
    let (mut pair, degenerate_init) = initial_pair(obj, cfg)?;

    let step_size = match (cfg.step_override, reg) {
        (Some(s), _) => s,
        (None, None) => step_size_smooth(&pair, obj)?,
        (None, Some(r)) => step_size_strongcvx(&pair, obj.smoothness().value, r.smoothness()),
    };

    let mut x = pair.product();
    let (f0, mut g) = obj.value_and_grad(&x)?;
    let mut f = f0;
    let mut tb = TraceBuilder::new(truth, &pair)?;
    let initial_dist = tb.initial_dist();
    let mut termination = Termination::MaxIters;

    for iter in 1..=cfg.max_iters {
        let (u, v, norm_sq) = step_from_grad(&pair, &g, reg, step_size)?;
        if !u.is_finite() || !v.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        let next = FactorPair::new(u, v)?;
        let x_next = next.product();
        if !x_next.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        let (f_next, g_next) = obj.value_and_grad(&x_next)?;
        let rel = relative_change(&x_next, &x);
        tb.push(iter, f_next, rel, &next)?;
        observer(&IterationEvent {
            iter,
            prev: &pair,
            next: &next,
            grad_prev: &g,
            factor_grad_norm_sq: norm_sq,
            f_prev: f,
            f_next,
            eta: step_size,
        });
        pair = next;
        x = x_next;
        g = g_next;
        f = f_next;
        if diverged(f, f0) {
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
        step_size,
        initial_f: f0,
        initial_dist,
        degenerate_init,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul_nt;
    use crate::objectives::LeastSquaresSensing;
    use crate::operators::{LinearMap, MaskOperator, SensingMap};

    fn realizable(m: usize, n: usize) -> (LeastSquaresSensing, DenseMatrix) {
        let x = DenseMatrix::from_fn(m, n, |i, j| (1 + i) as f64 * (2.0 - j as f64 * 0.5));
        let map = SensingMap::from(MaskOperator::full(m, n));
        let y = map.apply(&x).unwrap();
        (LeastSquaresSensing::new(map, y).unwrap(), x)
    }

    #[test]
    fn balanced_minimizer_is_fixed_point() {
        let (obj, x) = realizable(3, 4);
        let truth = GroundTruth::from_matrix(x, 1).unwrap();
        let cfg = SolverConfig::new(1).with_init(Init::Provided(truth.balanced().clone()));
        let reg = cfg.regularizer().unwrap();
        let res = bfgd_solve(&obj, Some(&reg), &cfg, Some(&truth)).unwrap();
        assert_eq!(res.termination, Termination::Tolerance);
        assert_eq!(res.trace.len(), 1);
        let rec = &res.trace.records[0];
        assert_eq!(rec.iter, 1);
        assert!(rec.rel_change <= 1e-14, "{}", rec.rel_change);
    }

    #[test]
    fn single_step_matches_hand_oracle() {
        // f(X) = ½‖X − Y‖² with every entry observed, so ∇f = X − Y.
        let y = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let map = SensingMap::from(MaskOperator::full(2, 2));
        let obj = LeastSquaresSensing::new(map.clone(), map.apply(&y).unwrap()).unwrap();
        let u = DenseMatrix::from_rows(&[&[1.0], &[0.5]]).unwrap();
        let v = DenseMatrix::from_rows(&[&[0.25], &[-1.0]]).unwrap();
        let pair = FactorPair::new(u, v).unwrap();
        let eta = 0.1;
        let next = bfgd_step(&obj, None, &pair, eta).unwrap();

        // X = [[0.25, −1], [0.125, −0.5]],  G = X − Y.
        let g = [[0.25 - 1.0, -1.0 - 2.0], [0.125 - 3.0, -0.5 - 4.0]];
        let (u0, u1, v0, v1) = (1.0, 0.5, 0.25, -1.0);
        let u_new = [
            u0 - eta * (g[0][0] * v0 + g[0][1] * v1),
            u1 - eta * (g[1][0] * v0 + g[1][1] * v1),
        ];
        let v_new = [
            v0 - eta * (g[0][0] * u0 + g[1][0] * u1),
            v1 - eta * (g[0][1] * u0 + g[1][1] * u1),
        ];
        for i in 0..2 {
            assert!((next.u().get(i, 0) - u_new[i]).abs() <= 1e-12);
            assert!((next.v().get(i, 0) - v_new[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn regularized_step_adds_balance_gradient() {
        let (obj, _) = realizable(3, 3);
        let pair = FactorPair::new(DenseMatrix::identity(3), DenseMatrix::zeros(3, 3)).unwrap();
        let reg = BalanceRegularizer::default();
        let plain = bfgd_step(&obj, None, &pair, 0.1).unwrap();
        let with = bfgd_step(&obj, Some(&reg), &pair, 0.1).unwrap();
        // M = I, so the U-part gains −η·4cλ·I = −0.025·I.
        let diff = plain.u().sub(with.u()).unwrap();
        assert!(diff.sub(&DenseMatrix::identity(3).scale(0.025)).unwrap().max_abs() <= 1e-15);
        assert_eq!(plain.v(), with.v());
    }

    #[test]
    fn strongly_convex_requires_regularizer() {
        let (obj, _) = realizable(3, 3);
        let cfg = SolverConfig::new(1);
        assert!(bfgd_solve(&obj, None, &cfg, None).is_err());
        assert!(bfgd_solve(&obj, None, &cfg.clone().with_regime(Regime::Smooth), None).is_ok());
    }

    #[test]
    fn oversized_step_diverges_with_partial_trace() {
        let (obj, _) = realizable(4, 4);
        let cfg = SolverConfig::new(2)
            .with_regime(Regime::Smooth)
            .with_init(Init::Random(3))
            .with_step(10.0);
        let res = bfgd_solve(&obj, None, &cfg, None).unwrap();
        assert_eq!(res.termination, Termination::Diverged);
        assert!(res.trace.len() < cfg.max_iters);
    }

    #[test]
    fn rank_and_provided_shape_checked() {
        let (obj, _) = realizable(3, 4);
        assert!(bfgd_solve(&obj, None, &SolverConfig::new(4).with_regime(Regime::Smooth), None).is_err());
        let wrong = FactorPair::zeros(4, 3, 1);
        let cfg = SolverConfig::new(1).with_regime(Regime::Smooth).with_init(Init::Provided(wrong));
        assert!(bfgd_solve(&obj, None, &cfg, None).is_err());
    }

    #[test]
    fn trace_iters_strictly_increase() {
        let (obj, x) = realizable(5, 4);
        let truth = GroundTruth::from_matrix(x, 1).unwrap();
        let cfg = SolverConfig::new(1).with_init(Init::Random(9)).with_max_iters(50);
        let reg = cfg.regularizer().unwrap();
        let res = bfgd_solve(&obj, Some(&reg), &cfg, Some(&truth)).unwrap();
        for w in res.trace.records.windows(2) {
            assert_eq!(w[1].iter, w[0].iter + 1);
            assert!(w[1].elapsed >= w[0].elapsed);
        }
        assert_eq!(res.x_hat, matmul_nt(res.final_pair.u(), res.final_pair.v()).unwrap());
    }
}
