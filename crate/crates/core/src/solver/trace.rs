use crate::linalg::DenseMatrix;
use crate::solver::FactorPair;

/// One row of a solve trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub f_value: f64,
    /// `‖X_t − X_{t−1}‖_F / ‖X_t‖_F`.
    pub rel_change: f64,
    pub dist_to_truth: Option<f64>,
    /// `dist_t² / dist_{t−1}²`.
    pub contraction: Option<f64>,
    /// `‖UᵀU − VᵀV‖_F`.
    pub balance_residual: f64,
    /// Seconds since the first iteration started.
    pub elapsed: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Median of the recorded contraction ratios.
    pub fn median_contraction(&self) -> Option<f64> {
        let mut c: Vec<f64> = self
            .records
            .iter()
            .filter_map(|r| r.contraction)
            .filter(|c| c.is_finite())
            .collect();
        if c.is_empty() {
            return None;
        }
        c.sort_by(f64::total_cmp);
        let k = c.len();
        Some(if k % 2 == 1 {
            c[k / 2]
        } else {
            0.5 * (c[k / 2 - 1] + c[k / 2])
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIters,
    Diverged,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIters => "max_iters",
            Termination::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub final_pair: FactorPair,
    /// `UVᵀ` of `final_pair`.
    pub x_hat: DenseMatrix,
    pub trace: SolveTrace,
    pub termination: Termination,
    pub step_size: f64,
    pub initial_f: f64,
    pub initial_dist: Option<f64>,
    /// Set when spectral initialization saw `∇f(0) = 0`.
    pub degenerate_init: bool,
}

/// `‖x_new − x_old‖_F / ‖x_new‖_F`, with `0/0 = 0`.
pub(crate) fn relative_change(x_new: &DenseMatrix, x_old: &DenseMatrix) -> f64 {
    let diff = x_new.sub(x_old).expect("same shape").frobenius_norm();
    let base = x_new.frobenius_norm();
    if diff == 0.0 {
        0.0
    } else if base == 0.0 {
        f64::INFINITY
    } else {
        diff / base
    }
}
