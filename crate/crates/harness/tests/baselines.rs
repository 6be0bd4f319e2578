use bfgd_core::metrics::relative_error;
use bfgd_core::solver::{bfgd_solve, svp_solve, SolveResult, SolverConfig, DEFAULT_SVP_STEP};
use bfgd_harness::instances::gen_sensing_instance;
use bfgd_harness::MapKind;

fn per_iteration_seconds(res: &SolveResult) -> f64 {
    res.trace.last().unwrap().elapsed / res.trace.len() as f64
}

#[test]
fn svp_and_bfgd_both_recover_the_sensing_instance() {
    let inst = gen_sensing_instance(64, 64, 3, 10.0, MapKind::Gaussian, 2024).unwrap();
    let cfg = SolverConfig::new(3).with_tol(1e-7);
    let reg = cfg.regularizer().unwrap();
    let bfgd = bfgd_solve(&inst.obj, Some(&reg), &cfg, Some(&inst.truth)).unwrap();
    let svp = svp_solve(&inst.obj, 3, DEFAULT_SVP_STEP, &cfg, Some(&inst.truth)).unwrap();
    for (name, res) in [("bfgd", &bfgd), ("svp", &svp)] {
        let err = relative_error(&res.x_hat, inst.truth.x_star()).unwrap();
        assert!(err <= 1e-4, "{name}: relative error {err} after {} iterations", res.trace.len());
    }
}

#[test]
fn svp_iterations_cost_more_than_bfgd_iterations() {
    let inst = gen_sensing_instance(512, 512, 20, 10.0, MapKind::Structured, 512).unwrap();
    let cfg = SolverConfig::new(20).with_max_iters(5).with_tol(f64::MIN_POSITIVE);
    let reg = cfg.regularizer().unwrap();
    let bfgd = bfgd_solve(&inst.obj, Some(&reg), &cfg, None).unwrap();
    let svp = svp_solve(&inst.obj, 20, DEFAULT_SVP_STEP, &cfg, None).unwrap();
    let (tb, ts) = (per_iteration_seconds(&bfgd), per_iteration_seconds(&svp));
    assert!(ts >= tb, "svp {ts:.4}s per iteration vs bfgd {tb:.4}s");
}
