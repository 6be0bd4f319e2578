use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::LinearMap;

/// Subsampled, sign-randomized Walsh–Hadamard map.
///
/// `A(X) = (1/√p) · S · H · D · pad(vec X)` where `D` is a random ±1
/// diagonal of length `N` (the next power of two ≥ m·n), `H` is the
/// unnormalized Hadamard transform and `S` keeps `p` distinct rows. Since
/// `H H = N·I`, `A A* = (N/p)·I` when `m·n = N`; with padding it is bounded
/// above by `(N/p)·I`.
#[derive(Debug, Clone)]
pub struct StructuredMap {
    m: usize,
    n: usize,
    sign_diagonal: Vec<f64>,
    selected_rows: Vec<usize>,
    seed: u64,
}

impl StructuredMap {
    pub fn new(m: usize, n: usize, p: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::InvalidArgument(
                "structured map needs positive dimensions".into(),
            ));
        }
        let len = (m * n).next_power_of_two();
        if p > len {
            return Err(Error::InvalidArgument(format!(
                "structured map: p = {p} exceeds transform length {len}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sign_diagonal = (0..len)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let mut selected_rows = rand::seq::index::sample(&mut rng, len, p).into_vec();
        selected_rows.sort_unstable();
        Ok(Self {
            m,
            n,
            sign_diagonal,
            selected_rows,
            seed,
        })
    }

    pub fn transform_len(&self) -> usize {
        self.sign_diagonal.len()
    }

    pub fn selected_rows(&self) -> &[usize] {
        &self.selected_rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn scale(&self) -> f64 {
        1.0 / (self.selected_rows.len() as f64).sqrt()
    }
}

/// In-place unnormalized fast Walsh–Hadamard transform; `v.len()` must be a
/// power of two.
pub(crate) fn fwht(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

impl LinearMap for StructuredMap {
    fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn num_measurements(&self) -> usize {
        self.selected_rows.len()
    }

    fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut buf = vec![0.0; self.transform_len()];
        for ((b, &v), &s) in buf.iter_mut().zip(x.data()).zip(&self.sign_diagonal) {
            *b = v * s;
        }
        fwht(&mut buf);
        let c = self.scale();
        Ok(self.selected_rows.iter().map(|&k| c * buf[k]).collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<DenseMatrix> {
        self.check_measurements(y)?;
        let mut buf = vec![0.0; self.transform_len()];
        let c = self.scale();
        for (&k, &v) in self.selected_rows.iter().zip(y) {
            buf[k] = c * v;
        }
        fwht(&mut buf);
        let data = buf
            .iter()
            .zip(&self.sign_diagonal)
            .take(self.m * self.n)
            .map(|(b, s)| b * s)
            .collect();
        DenseMatrix::new(self.m, self.n, data)
    }

    fn norm_sq_upper_bound(&self) -> f64 {
        self.transform_len() as f64 / self.selected_rows.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::test_support::{adjoint_gap, inner};
    use rand_distr::StandardNormal;

    #[test]
    fn hadamard_squares_to_scaled_identity() {
        let mut v = vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 1.0, -1.0];
        let orig = v.clone();
        fwht(&mut v);
        fwht(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - 8.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_identity() {
        let map = StructuredMap::new(5, 7, 20, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(adjoint_gap(&map, &mut rng) <= 1e-10);
        }
    }

    #[test]
    fn apply_adjoint_is_scaled_identity_on_measurements() {
        let map = StructuredMap::new(6, 6, 17, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y: Vec<f64> = (0..17).map(|_| rng.sample(StandardNormal)).collect();
        // With m·n a power of two there is no padding and A A* = (N/p)·I.
        let back = map.apply(&map.adjoint(&y).unwrap()).unwrap();
        let full = StructuredMap::new(8, 8, 17, 3).unwrap();
        let back_full = full.apply(&full.adjoint(&y).unwrap()).unwrap();
        let ratio = full.norm_sq_upper_bound();
        for (a, b) in back_full.iter().zip(&y) {
            assert!((a - ratio * b).abs() < 1e-10);
        }
        // Truncated padding can only shrink the composition.
        assert!(inner(&back, &y) <= ratio * inner(&y, &y) + 1e-10);
    }

    #[test]
    fn rejects_oversampling() {
        assert!(StructuredMap::new(2, 2, 5, 0).is_err());
    }
}
