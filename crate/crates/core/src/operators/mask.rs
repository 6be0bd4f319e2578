use rand::Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::LinearMap;

/// Entry-sampling operator `X ↦ (X_ij)_{(i,j) ∈ Ω}` with Ω sorted row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskOperator {
    m: usize,
    n: usize,
    omega: Vec<(usize, usize)>,
}

#[derive(Debug, Error)]
pub enum MaskParseError {
    #[error("line {line}: expected `i,j`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl MaskOperator {
    /// Build from an index list, which is sorted here. Duplicates and
    /// out-of-range indices are rejected.
    pub fn new(m: usize, n: usize, mut omega: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = omega.iter().find(|&&(i, j)| i >= m || j >= n) {
            return Err(Error::InvalidArgument(format!(
                "mask index ({i}, {j}) outside {m}x{n}"
            )));
        }
        omega.sort_unstable();
        if let Some(w) = omega.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate mask index {:?}",
                w[0]
            )));
        }
        Ok(Self { m, n, omega })
    }

    /// Every entry observed.
    pub fn full(m: usize, n: usize) -> Self {
        let omega = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        Self { m, n, omega }
    }

    /// `count` entries drawn uniformly without replacement.
    pub fn sample<R: Rng + ?Sized>(m: usize, n: usize, count: usize, rng: &mut R) -> Result<Self> {
        if count > m * n {
            return Err(Error::InvalidArgument(format!(
                "cannot sample {count} of {} entries",
                m * n
            )));
        }
        let mut flat = rand::seq::index::sample(rng, m * n, count).into_vec();
        flat.sort_unstable();
        Ok(Self {
            m,
            n,
            omega: flat.into_iter().map(|k| (k / n, k % n)).collect(),
        })
    }

    pub fn indices(&self) -> &[(usize, usize)] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.omega.binary_search(&(i, j)).is_ok()
    }

    /// Entries of `[0,m)×[0,n)` not in Ω, row-major.
    pub fn complement(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m * self.n - self.omega.len());
        let mut it = self.omega.iter().peekable();
        for i in 0..self.m {
            for j in 0..self.n {
                if it.peek() == Some(&&(i, j)) {
                    it.next();
                } else {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// One `i,j` line per observed entry (0-based).
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.omega.len() * 8);
        for &(i, j) in &self.omega {
            s.push_str(&format!("{i},{j}\n"));
        }
        s
    }

    pub fn from_csv(m: usize, n: usize, text: &str) -> std::result::Result<Self, MaskParseError> {
        let mut omega = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || (lineno == 0 && t == "i,j") {
                continue;
            }
            let malformed = || MaskParseError::Malformed {
                line: lineno + 1,
                text: line.to_string(),
            };
            let (a, b) = t.split_once(',').ok_or_else(malformed)?;
            let i = a.trim().parse::<usize>().map_err(|_| malformed())?;
            let j = b.trim().parse::<usize>().map_err(|_| malformed())?;
            omega.push((i, j));
        }
        Ok(Self::new(m, n, omega)?)
    }
}

impl LinearMap for MaskOperator {
    fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn num_measurements(&self) -> usize {
        self.omega.len()
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.omega.iter().map(|&(i, j)| x.get(i, j)).collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<DenseMatrix> {
        self.check_measurements(y)?;
        let mut out = DenseMatrix::zeros(self.m, self.n);
        for (&(i, j), &v) in self.omega.iter().zip(y) {
            out.set(i, j, v);
        }
        Ok(out)
    }

    fn norm_sq_upper_bound(&self) -> f64 {
        if self.omega.is_empty() {
            0.0
        } else {
            1.0
        }
    }
}
