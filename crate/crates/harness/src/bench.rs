use std::time::Instant;

use bfgd_core::linalg::{matmul, truncated_svd, DenseMatrix, TruncatedSvdOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Median timings, in seconds, of one rank-`r` truncated SVD of an `m×m`
/// matrix against two `(m×m)·(m×r)` products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub m: usize,
    pub r: usize,
    pub t_svd: f64,
    pub t_mm: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "m,r,t_svd,t_mm";

    pub fn to_csv_line(&self) -> String {
        format!("{},{},{:.16e},{:.16e}", self.m, self.r, self.t_svd, self.t_mm)
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

pub fn bench_svd_vs_matmul(m: usize, r: usize, trials: usize, seed: u64) -> Result<BenchRow> {
    if m == 0 || r == 0 || trials == 0 {
        return Err(HarnessError::Config("bench-svd needs m, r, trials >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DenseMatrix::random_gaussian(m, m, &mut rng);
    let b = DenseMatrix::random_gaussian(m, r, &mut rng);
    let opts = TruncatedSvdOptions {
        seed,
        ..TruncatedSvdOptions::default()
    };
    let mut t_svd = Vec::with_capacity(trials);
    let mut t_mm = Vec::with_capacity(trials);
    for _ in 0..trials {
        let start = Instant::now();
        let svd = truncated_svd(&a, r, opts)?;
        t_svd.push(start.elapsed().as_secs_f64());
        std::hint::black_box(svd);

        let start = Instant::now();
        let p1 = matmul(&a, &b)?;
        let p2 = matmul(&a, &p1)?;
        t_mm.push(start.elapsed().as_secs_f64());
        std::hint::black_box(p2);
    }
    Ok(BenchRow {
        m,
        r,
        t_svd: median(t_svd),
        t_mm: median(t_mm),
    })
}
