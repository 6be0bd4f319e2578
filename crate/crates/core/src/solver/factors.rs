use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{matmul_nt, DenseMatrix};

/// The iterate `(U, V)` with `U: m×r`, `V: n×r`, representing `X = UVᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    u: DenseMatrix,
    v: DenseMatrix,
}

impl FactorPair {
    pub fn new(u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if u.cols() != v.cols() {
            return Err(dim_mismatch("FactorPair::new", u.cols(), v.cols()));
        }
        if u.cols() == 0 {
            return Err(Error::InvalidArgument("factor rank must be at least 1".into()));
        }
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite("FactorPair::new"));
        }
        Ok(Self { u, v })
    }

    pub fn zeros(m: usize, n: usize, r: usize) -> Self {
        Self {
            u: DenseMatrix::zeros(m, r),
            v: DenseMatrix::zeros(n, r),
        }
    }

    /// Split a stacked `W = [U; V]` after its first `m` rows.
    pub fn from_stacked(w: &DenseMatrix, m: usize) -> Result<Self> {
        if m > w.rows() {
            return Err(dim_mismatch("FactorPair::from_stacked", format!("<= {}", w.rows()), m));
        }
        Self::new(w.row_block(0, m), w.row_block(m, w.rows()))
    }

    #[inline]
    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    #[inline]
    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    /// `(m, n)` of the represented matrix.
    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    /// `W = [U; V]`.
    pub fn stacked(&self) -> DenseMatrix {
        self.u.vstack(&self.v).expect("shared rank")
    }

    /// `UVᵀ`.
    pub fn product(&self) -> DenseMatrix {
        matmul_nt(&self.u, &self.v).expect("shared rank")
    }

    /// Right-multiply both factors by `r`.
    pub fn rotate(&self, r: &DenseMatrix) -> Result<Self> {
        Self::new(
            crate::linalg::matmul(&self.u, r)?,
            crate::linalg::matmul(&self.v, r)?,
        )
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseMatrix) {
        (self.u, self.v)
    }
}
