use std::fmt::Write as _;
use std::path::Path;

use bfgd_core::linalg::{matmul_nt, DenseMatrix};
use bfgd_core::metrics::relative_error;
use bfgd_core::solver::{bfgd_solve, Regime, SolverConfig};
use bfgd_harness::ingest::{masked_completion, parse_pgm};
use bfgd_harness::output::parse_trace_csv;
use bfgd_harness::runner::report_path;
use bfgd_harness::{replay, run_experiment, ExperimentConfig, RunReport, SolverKind, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Binary PGM of a piecewise-constant image of rank at most two.
fn write_blocky_pgm(path: &Path, rows: usize, cols: usize) -> DenseMatrix {
    let left = [255u8, 40, 170, 90];
    let right = [10u8, 200, 60];
    let mut bytes = format!("P5\n# synthetic\n{cols} {rows}\n255\n").into_bytes();
    for i in 0..rows {
        for j in 0..cols {
            bytes.push(if j < cols / 2 { left[i % 4] } else { right[i % 3] });
        }
    }
    std::fs::write(path, &bytes).unwrap();
    parse_pgm(&bytes).unwrap()
}

#[test]
fn rank_five_image_completion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = DenseMatrix::random_uniform(64, 5, 0.0, 1.0, &mut rng);
    let v = DenseMatrix::random_uniform(64, 5, 0.0, 1.0, &mut rng);
    let img = matmul_nt(&u, &v).unwrap();
    let img = img.scale(1.0 / img.max_abs());
    let inst = masked_completion(img.clone(), 0.35, 11).unwrap();
    let cfg = SolverConfig::new(5).with_tol(1e-9).with_max_iters(20_000);
    let reg = cfg.regularizer().unwrap();
    let res = bfgd_solve(&inst.obj, Some(&reg), &cfg, None).unwrap();
    let err = relative_error(&res.x_hat, &img).unwrap();
    assert!(err <= 1e-3, "relative error {err} after {} iterations", res.trace.len());
}

#[test]
fn fully_observed_pgm_through_svp_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("blocks.pgm");
    write_blocky_pgm(&path, 24, 30);
    let mut cfg = ExperimentConfig::new(Task::Image, 0, 0, 2);
    cfg.image_path = Some(path);
    cfg.observe_fraction = Some(1.0);
    cfg.solver = SolverKind::Svp;
    cfg.tol = Some(1e-12);
    let report = run_experiment(&cfg, dir.path(), true).unwrap();
    assert_eq!(report.termination, "tolerance");
    let psnr = report.metrics.psnr.unwrap();
    assert!(psnr >= 100.0, "psnr {psnr}");
}

#[test]
fn synthetic_ratings_beat_chance() {
    let (m, n, r) = (200, 300, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let u = DenseMatrix::random_gaussian(m, r, &mut rng);
    let v = DenseMatrix::random_gaussian(n, r, &mut rng);
    let x = matmul_nt(&u, &v).unwrap();
    let spread = (x.frobenius_norm_sq() / (m * n) as f64).sqrt();
    let mut text = String::new();
    for i in 0..m {
        for j in 0..n {
            if rng.random::<f64>() < 0.2 {
                let rating = (3.0 + 1.2 * x.get(i, j) / spread).round().clamp(1.0, 5.0);
                writeln!(text, "{}\t{}\t{}\t{}", i + 1, j + 1, rating, 880_000_000 + i * n + j).unwrap();
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.data");
    std::fs::write(&path, text).unwrap();

    let mut cfg = ExperimentConfig::new(Task::OnebitMovielens, 0, 0, r);
    cfg.ratings_path = Some(path);
    cfg.holdout = 1000;
    cfg.solver = SolverKind::BfgdSmooth;
    let report = run_experiment(&cfg, dir.path(), true).unwrap();
    let acc = report.metrics.sign_accuracy.unwrap();
    assert!(acc >= 0.70, "held-out accuracy {acc}");
    assert!(report.metrics.relative_error.is_none());
}

#[test]
fn tolerance_stop_row_meets_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(Task::Completion, 30, 25, 2);
    cfg.observe_fraction = Some(0.5);
    cfg.tol = Some(1e-6);
    let report = run_experiment(&cfg, dir.path(), true).unwrap();
    assert_eq!(report.termination, "tolerance");
    let rows = parse_trace_csv(&std::fs::read_to_string(report.trace_path.unwrap()).unwrap()).unwrap();
    assert_eq!(rows.len(), report.iterations);
    assert!(rows.last().unwrap().rel_change <= 1e-6);
    assert!(rows.iter().all(|r| r.elapsed_s.is_none()));
}

#[test]
fn report_round_trips_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(Task::Sensing, 12, 10, 2);
    cfg.name = Some("rt".into());
    cfg.record_elapsed = true;
    let report = run_experiment(&cfg, dir.path(), true).unwrap();
    let path = report_path(dir.path(), &cfg);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(RunReport::from_json(&text).unwrap(), report);
    assert_eq!(report.to_json(), text);
    let rp = replay(&path).unwrap();
    assert!(rp.matches(), "{rp:?}");
}

#[test]
fn replay_detects_tampered_factors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(Task::Sensing, 10, 10, 1);
    let report = run_experiment(&cfg, dir.path(), true).unwrap();
    let fp = report.factors_path.unwrap();
    let text = std::fs::read_to_string(&fp).unwrap();
    // Perturb one factor entry in the V block.
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let k = lines.len() - 1;
    lines[k] = format!("{:.16e}", lines[k].trim().parse::<f64>().unwrap() + 0.5);
    std::fs::write(&fp, lines.join("\n") + "\n").unwrap();
    assert!(!replay(&report_path(dir.path(), &cfg)).unwrap().matches());
}

#[test]
fn huge_step_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(Task::Sensing, 10, 10, 2);
    cfg.step = Some(50.0);
    cfg.solver = SolverKind::BfgdSmooth;
    let report = run_experiment(&cfg, dir.path(), true).unwrap();
    assert!(report.diverged());
    assert!(report.iterations < 4000);
}

#[test]
fn smooth_and_regularized_share_instances() {
    let mut a = ExperimentConfig::new(Task::Sensing, 10, 8, 2);
    let mut b = a.clone();
    a.solver = SolverKind::Bfgd;
    b.solver = SolverKind::BfgdSmooth;
    let pa = bfgd_harness::build_problem(&a).unwrap();
    let pb = bfgd_harness::build_problem(&b).unwrap();
    let x = pa.truth.as_ref().unwrap().x_star();
    assert_eq!(x, pb.truth.as_ref().unwrap().x_star());
    assert_eq!(bfgd_harness::runner::solver_config(&b).regime, Regime::Smooth);
}
