use crate::error::{Error, Result};
use crate::objectives::BalanceRegularizer;
use crate::solver::FactorPair;

pub const DEFAULT_MAX_ITERS: usize = 4000;
pub const DEFAULT_TOL: f64 = 5e-6;
pub const DEFAULT_SVP_STEP: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Balanced split of the rank-r truncation of `−(1/L)∇f(0)`.
    Spectral,
    /// Gaussian factors rescaled so that `‖UVᵀ‖_F = 1`.
    Random(u64),
    Provided(FactorPair),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Plain factored gradient steps with the smooth-case step size.
    Smooth,
    /// Steps on `f + λg` with the strongly-convex step size.
    StronglyConvex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub rank: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub step_override: Option<f64>,
    pub lambda: f64,
    pub reg_coefficient: f64,
    pub init: Init,
    pub regime: Regime,
}

impl SolverConfig {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            step_override: None,
            lambda: 1.0,
            reg_coefficient: 1.0 / 16.0,
            init: Init::Spectral,
            regime: Regime::StronglyConvex,
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step_override = Some(step);
        self
    }

    /// The balance regularizer described by `lambda` and `reg_coefficient`.
    pub fn regularizer(&self) -> Result<BalanceRegularizer> {
        BalanceRegularizer::new(self.reg_coefficient, self.lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(s) = self.step_override {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("step must be positive, got {s}")));
            }
        }
        Ok(())
    }
}
