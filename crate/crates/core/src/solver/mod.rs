//! Bi-factored gradient descent, its lifted form, and the SVP baseline.

mod bfgd;
mod config;
mod factors;
mod init;
mod lift;
mod step;
mod svp;
mod trace;

pub use bfgd::{bfgd_solve, bfgd_solve_with_observer, bfgd_step, IterationEvent, DIVERGENCE_FACTOR};
pub use config::{Init, Regime, SolverConfig, DEFAULT_MAX_ITERS, DEFAULT_SVP_STEP, DEFAULT_TOL};
pub use factors::FactorPair;
pub use init::{random_init, spectral_init, SpectralInit};
pub use lift::{lifted_fgd_step, lifted_gradient, lifted_objective_grad, lifted_value};
pub use step::{smooth_iterate_bound, step_size_smooth, step_size_strongcvx, strongcvx_iterate_bound};
pub use svp::svp_solve;
pub use trace::{SolveResult, SolveTrace, Termination, TraceRecord};
