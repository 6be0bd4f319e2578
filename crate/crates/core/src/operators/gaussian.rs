use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{matvec, matvec_t, DenseMatrix};
use crate::operators::LinearMap;

/// Dense Gaussian measurement map with i.i.d. `N(0, 1/p)` entries acting on
/// the row-major vectorization of `X`.
#[derive(Debug, Clone)]
pub struct GaussianMap {
    m: usize,
    n: usize,
    rows: DenseMatrix,
    seed: u64,
}

impl GaussianMap {
    pub fn new(m: usize, n: usize, p: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::InvalidArgument(
                "Gaussian map needs positive dimensions".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = DenseMatrix::random_gaussian(p, m * n, &mut rng).scale(1.0 / (p as f64).sqrt());
        Ok(Self { m, n, rows, seed })
    }

    /// The explicit `p × (m·n)` measurement matrix.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl LinearMap for GaussianMap {
    fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn num_measurements(&self) -> usize {
        self.rows.rows()
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.check_input(x)?;
        matvec(&self.rows, x.data())
    }

    fn adjoint(&self, y: &[f64]) -> Result<DenseMatrix> {
        self.check_measurements(y)?;
        DenseMatrix::new(self.m, self.n, matvec_t(&self.rows, y)?)
    }

    fn norm_sq_upper_bound(&self) -> f64 {
        self.rows.frobenius_norm_sq()
    }
}
