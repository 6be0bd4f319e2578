use std::path::{Path, PathBuf};
use std::time::Instant;

use bfgd_core::linalg::DenseMatrix;
use bfgd_core::metrics::{procrustes_dist, psnr, relative_error, sign_accuracy, GroundTruth};
use bfgd_core::objectives::Objective;
use bfgd_core::solver::{
    bfgd_solve_with_observer, svp_solve, FactorPair, Init, Regime, SolveResult, SolverConfig, Termination,
    DEFAULT_SVP_STEP,
};
use serde::{Deserialize, Serialize};

use crate::bench::{bench_svd_vs_matmul, BenchRow};
use crate::config::{ExperimentConfig, InitKind, SolverKind, Task};
use crate::error::{io_err, HarnessError, Result};
use crate::ingest::{ingest_image, ingest_movielens};
use crate::instances::{gen_completion_instance, gen_onebit_instance, gen_sensing_instance};
use crate::output::{factors_to_text, parse_factors, parse_trace_csv, to_json_full_precision, trace_to_csv};

/// PSNR peak for images scaled to `[0, 1]`.
pub const IMAGE_PEAK: f64 = 1.0;

/// A built instance: objective plus whatever the metrics need.
pub struct Problem {
    pub obj: Box<dyn Objective>,
    pub truth: Option<GroundTruth>,
    /// Image pixels, when the task is an image.
    pub reference: Option<DenseMatrix>,
    pub test_set: Vec<(usize, usize, f64)>,
    /// Non-fatal notes about the instance.
    pub warnings: Vec<String>,
}

/// Deterministically build the instance described by `cfg`.
pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem> {
    cfg.validate()?;
    let seed = cfg.stream_seed();
    let (m, n, r) = (cfg.m, cfg.n, cfg.rank);
    let mut warnings = Vec::new();
    let problem = match cfg.task {
        Task::Sensing => {
            let inst = gen_sensing_instance(m, n, r, cfg.sample_factor, cfg.map, seed)?;
            if inst.oversampled {
                warnings.push(format!("p = C·n·r exceeds m·n = {}", m * n));
            }
            Problem {
                obj: Box::new(inst.obj),
                truth: Some(inst.truth),
                reference: None,
                test_set: Vec::new(),
                warnings,
            }
        }
        Task::Completion => {
            let inst = gen_completion_instance(m, n, r, cfg.fraction(), seed)?;
            Problem {
                obj: Box::new(inst.obj),
                truth: Some(inst.truth),
                reference: None,
                test_set: Vec::new(),
                warnings,
            }
        }
        Task::Image => {
            let path = cfg.image_path.as_deref().expect("validated");
            let inst = ingest_image(path, cfg.fraction(), seed)?;
            Problem {
                obj: Box::new(inst.obj),
                truth: Some(GroundTruth::from_matrix(inst.reference.clone(), r)?),
                reference: Some(inst.reference),
                test_set: Vec::new(),
                warnings,
            }
        }
        Task::OnebitSynth => {
            let inst = gen_onebit_instance(m, n, r, cfg.fraction(), cfg.link, cfg.noise_sigma, cfg.alpha, seed)?;
            Problem {
                obj: inst.obj,
                truth: Some(inst.truth),
                reference: None,
                test_set: inst.test_set,
                warnings,
            }
        }
        Task::OnebitMovielens => {
            let path = cfg.ratings_path.as_deref().expect("validated");
            let inst = ingest_movielens(path, cfg.holdout, seed)?;
            Problem {
                obj: Box::new(inst.obj),
                truth: None,
                reference: None,
                test_set: inst.test_set,
                warnings,
            }
        }
        Task::BenchSvd => return Err(HarnessError::Config("bench-svd has no solve instance".into())),
    };
    Ok(problem)
}

pub fn solver_config(cfg: &ExperimentConfig) -> SolverConfig {
    let mut sc = SolverConfig::new(cfg.rank);
    if let Some(t) = cfg.tol {
        sc.tol = t;
    }
    if let Some(k) = cfg.max_iters {
        sc.max_iters = k;
    }
    sc.step_override = cfg.step;
    if let Some(l) = cfg.lambda {
        sc.lambda = l;
    }
    if let Some(c) = cfg.reg_coefficient {
        sc.reg_coefficient = c;
    }
    sc.init = match cfg.init {
        InitKind::Spectral => Init::Spectral,
        InitKind::Random => Init::Random(cfg.init_seed.unwrap_or(cfg.stream_seed())),
    };
    sc.regime = match cfg.solver {
        SolverKind::Bfgd => Regime::StronglyConvex,
        SolverKind::BfgdSmooth | SolverKind::Svp => Regime::Smooth,
    };
    sc
}

/// Run the configured solver on `problem`. Progress goes to stderr unless
/// `quiet`.
pub fn solve(problem: &Problem, cfg: &ExperimentConfig, quiet: bool) -> Result<SolveResult> {
    let sc = solver_config(cfg);
    let truth = problem.truth.as_ref();
    let res = match cfg.solver {
        SolverKind::Svp => svp_solve(&problem.obj, cfg.rank, cfg.mu_step.unwrap_or(DEFAULT_SVP_STEP), &sc, truth)?,
        SolverKind::Bfgd | SolverKind::BfgdSmooth => {
            let reg = sc.regularizer()?;
            bfgd_solve_with_observer(&problem.obj, Some(&reg), &sc, truth, |ev| {
                if !quiet && ev.iter % 500 == 0 {
                    eprintln!("  iter {:>5}  f = {:.6e}", ev.iter, ev.f_next);
                }
            })?
        }
    };
    Ok(res)
}

/// Metrics of a final iterate. Non-finite values are stored as `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub final_f: Option<f64>,
    pub final_dist: Option<f64>,
    pub relative_error: Option<f64>,
    pub sign_accuracy: Option<f64>,
    pub psnr: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn compute_metrics(problem: &Problem, pair: &FactorPair) -> Result<FinalMetrics> {
    let x_hat = pair.product();
    let final_f = problem.obj.value_and_grad(&x_hat)?.0;
    let final_dist = problem.truth.as_ref().map(|t| procrustes_dist(pair, t)).transpose()?;
    let target = problem.reference.as_ref().or(problem.truth.as_ref().map(|t| t.x_star()));
    let relative_error = target.map(|x| relative_error(&x_hat, x)).transpose()?;
    let sign_accuracy = if problem.test_set.is_empty() {
        None
    } else {
        Some(sign_accuracy(&x_hat, &problem.test_set)?)
    };
    let psnr = problem.reference.as_ref().map(|x| psnr(&x_hat, x, IMAGE_PEAK)).transpose()?;
    Ok(FinalMetrics {
        final_f: finite(final_f),
        final_dist: final_dist.and_then(finite),
        relative_error: relative_error.and_then(finite),
        sign_accuracy,
        psnr: psnr.and_then(finite),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    /// `tolerance`, `max_iters`, `diverged`, or `completed` for benchmarks.
    pub termination: String,
    pub iterations: usize,
    pub step_size: Option<f64>,
    pub initial_f: Option<f64>,
    #[serde(flatten)]
    pub metrics: FinalMetrics,
    pub wall_time_s: f64,
    pub trace_path: Option<PathBuf>,
    pub factors_path: Option<PathBuf>,
    pub bench: Option<BenchRow>,
    pub bench_path: Option<PathBuf>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn diverged(&self) -> bool {
        self.termination == Termination::Diverged.as_str()
    }

    pub fn to_json(&self) -> String {
        to_json_full_precision(self)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

pub fn report_path(out_dir: &Path, cfg: &ExperimentConfig) -> PathBuf {
    out_dir.join(format!("{}.report.json", cfg.stem()))
}

/// Build, solve, and write `<stem>.trace.csv`, `<stem>.factors.txt` and
/// `<stem>.report.json` under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, quiet: bool) -> Result<RunReport> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let stem = cfg.stem();
    let start = Instant::now();

    if cfg.task == Task::BenchSvd {
        let row = bench_svd_vs_matmul(cfg.m, cfg.rank, cfg.trials, cfg.stream_seed())?;
        let path = out_dir.join(format!("{stem}.bench.csv"));
        write(&path, &format!("{}\n{}\n", BenchRow::CSV_HEADER, row.to_csv_line()))?;
        if !quiet {
            eprintln!("bench-svd m={} r={}: t_svd={:.3e}s t_mm={:.3e}s", row.m, row.r, row.t_svd, row.t_mm);
        }
        let report = RunReport {
            config: cfg.clone(),
            termination: "completed".into(),
            iterations: 0,
            step_size: None,
            initial_f: None,
            metrics: FinalMetrics::default(),
            wall_time_s: start.elapsed().as_secs_f64(),
            trace_path: None,
            factors_path: None,
            bench: Some(row),
            bench_path: Some(path),
            warnings: Vec::new(),
        };
        write(&report_path(out_dir, cfg), &report.to_json())?;
        return Ok(report);
    }

    let problem = build_problem(cfg)?;
    if !quiet {
        for w in &problem.warnings {
            eprintln!("warning: {w}");
        }
        let (m, n) = problem.obj.shape();
        eprintln!("{stem}: {} {m}x{n} rank {} with {:?}", cfg.task.as_str(), cfg.rank, cfg.solver);
    }
    let res = solve(&problem, cfg, quiet)?;
    let metrics = compute_metrics(&problem, &res.final_pair)?;

    let trace_path = out_dir.join(format!("{stem}.trace.csv"));
    let factors_path = out_dir.join(format!("{stem}.factors.txt"));
    write(&trace_path, &trace_to_csv(&res.trace, cfg.record_elapsed))?;
    write(&factors_path, &factors_to_text(&res.final_pair))?;

    let report = RunReport {
        config: cfg.clone(),
        termination: res.termination.as_str().into(),
        iterations: res.trace.len(),
        step_size: finite(res.step_size),
        initial_f: finite(res.initial_f),
        metrics,
        wall_time_s: start.elapsed().as_secs_f64(),
        trace_path: Some(trace_path),
        factors_path: Some(factors_path),
        bench: None,
        bench_path: None,
        warnings: problem.warnings,
    };
    write(&report_path(out_dir, cfg), &report.to_json())?;
    if !quiet {
        eprintln!(
            "{stem}: {} after {} iterations, relative error {:?}",
            report.termination, report.iterations, report.metrics.relative_error
        );
    }
    Ok(report)
}

/// Result of re-deriving a report from its artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub report: RunReport,
    pub recomputed: FinalMetrics,
    /// `(f_value, dist)` of the last trace row.
    pub trace_final: Option<(f64, Option<f64>)>,
}

impl Replay {
    /// Recomputed metrics equal the reported ones, and the trace's last row
    /// agrees with both.
    pub fn matches(&self) -> bool {
        let trace_ok = match self.trace_final {
            Some((f, d)) => finite(f) == self.recomputed.final_f && d.and_then(finite) == self.recomputed.final_dist,
            None => self.report.iterations == 0,
        };
        trace_ok && self.recomputed == self.report.metrics
    }
}

/// Rebuild the instance from a report's config, reload its factors and
/// trace, and recompute the final metrics.
pub fn replay(report_file: &Path) -> Result<Replay> {
    let text = std::fs::read_to_string(report_file).map_err(io_err(report_file))?;
    let report = RunReport::from_json(&text).map_err(|source| HarnessError::Json {
        path: report_file.to_path_buf(),
        source,
    })?;
    let (Some(factors_path), Some(trace_path)) = (&report.factors_path, &report.trace_path) else {
        return Err(HarnessError::Config("report has no solve artifacts to replay".into()));
    };
    let factors = std::fs::read_to_string(factors_path).map_err(io_err(factors_path))?;
    let pair = parse_factors(&factors)?;
    let trace = std::fs::read_to_string(trace_path).map_err(io_err(trace_path))?;
    let rows = parse_trace_csv(&trace)?;
    let problem = build_problem(&report.config)?;
    let recomputed = compute_metrics(&problem, &pair)?;
    Ok(Replay {
        trace_final: rows.last().map(|r| (r.f_value, r.dist)),
        report,
        recomputed,
    })
}
