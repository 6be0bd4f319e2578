//! Experiment orchestration for bi-factored gradient descent: synthetic and
//! ingested instances, solver runs, trace and report files, and the
//! SVD-versus-matmul micro-benchmark.

pub mod bench;
pub mod config;
pub mod error;
pub mod ingest;
pub mod instances;
pub mod output;
pub mod runner;

pub use bench::{bench_svd_vs_matmul, BenchRow};
pub use config::{ExperimentConfig, InitKind, Link, MapKind, SolverKind, Task};
pub use error::{HarnessError, Result};
pub use runner::{build_problem, replay, run_experiment, FinalMetrics, Replay, RunReport};
