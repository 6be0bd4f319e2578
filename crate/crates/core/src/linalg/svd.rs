use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{matmul, matmul_nt, matmul_tn, qr_thin, DenseMatrix};

/// Largest `min(rows, cols)` accepted by [`svd_small`].
pub const SMALL_SVD_CAP: usize = 64;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `a ≈ left · diag(singulars) · rightᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left: DenseMatrix,
    pub singulars: Vec<f64>,
    pub right: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singulars.len()
    }

    /// `left · diag(singulars) · rightᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let ls = self.left.scale_columns(&self.singulars);
        matmul_nt(&ls, &self.right).expect("consistent SVD factors")
    }

    /// Keep the leading `k` triplets.
    pub fn truncate(mut self, k: usize) -> Self {
        let k = k.min(self.rank());
        self.left = self.left.leading_columns(k);
        self.right = self.right.leading_columns(k);
        self.singulars.truncate(k);
        self
    }

    /// Balanced split `(A Σ^{1/2}, B Σ^{1/2})`.
    pub fn balanced_factors(&self) -> (DenseMatrix, DenseMatrix) {
        let roots: Vec<f64> = self.singulars.iter().map(|s| s.sqrt()).collect();
        (self.left.scale_columns(&roots), self.right.scale_columns(&roots))
    }
}

/// Full thin SVD by one-sided (Hestenes) Jacobi.
pub fn svd_small(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k > SMALL_SVD_CAP {
        return Err(Error::CapExceeded {
            cap: SMALL_SVD_CAP,
            got: k,
        });
    }
    let mut out = if m >= n {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose());
        SvdResult {
            left: t.right,
            singulars: t.singulars,
            right: t.left,
        }
    };
    apply_sign_convention(&mut out);
    Ok(out)
}

/// One-sided Jacobi on a tall (m >= n) matrix.
fn jacobi_tall(a: &DenseMatrix) -> SvdResult {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        al += x * x;
                        be += y * y;
                        ga += x * y;
                    }
                    (al, be, ga)
                };
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut norms: Vec<(usize, f64)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, c.iter().map(|x| x * x).sum::<f64>().sqrt()))
        .collect();
    norms.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let smax = norms.first().map_or(0.0, |x| x.1);
    let floor = smax * (m.max(n) as f64) * eps;
    let mut left_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut singulars = Vec::with_capacity(n);
    let mut right = DenseMatrix::zeros(n, n);
    for (dst, &(src, s)) in norms.iter().enumerate() {
        for i in 0..n {
            right.set(i, dst, vcols[src][i]);
        }
        if s > floor && s > 0.0 {
            left_cols.push(cols[src].iter().map(|x| x / s).collect());
            singulars.push(s);
        } else {
            left_cols.push(Vec::new());
            singulars.push(if s > 0.0 { s } else { 0.0 });
        }
    }
    complete_orthonormal(&mut left_cols, m);
    let left = DenseMatrix::from_fn(m, n, |i, j| left_cols[j][i]);
    SvdResult {
        left,
        singulars,
        right,
    }
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Replace empty entries of `cols` with unit vectors orthogonal to the rest.
fn complete_orthonormal(cols: &mut [Vec<f64>], m: usize) {
    let mut candidate = 0usize;
    for j in 0..cols.len() {
        if !cols[j].is_empty() {
            continue;
        }
        loop {
            assert!(candidate < m, "cannot complete orthonormal basis");
            let mut v = vec![0.0; m];
            v[candidate] = 1.0;
            candidate += 1;
            // Two passes of Gram-Schmidt.
            for _ in 0..2 {
                for other in cols.iter().filter(|c| !c.is_empty()) {
                    let d: f64 = other.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (vi, oi) in v.iter_mut().zip(other) {
                        *vi -= d * oi;
                    }
                }
            }
            let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm > 0.5 {
                v.iter_mut().for_each(|x| *x /= nrm);
                cols[j] = v;
                break;
            }
        }
    }
}

/// Flip each triplet so the largest-magnitude entry of its left vector is
/// nonnegative.
fn apply_sign_convention(svd: &mut SvdResult) {
    for j in 0..svd.left.cols() {
        let col = svd.left.column(j);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |best, v| if v.abs() > best.abs() { v } else { best });
        if pivot < 0.0 {
            svd.left.scale_column(j, -1.0);
            svd.right.scale_column(j, -1.0);
        }
    }
}

/// Knobs for [`truncated_svd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSvdOptions {
    pub power_iters: usize,
    pub oversample: usize,
    pub seed: u64,
}

impl Default for TruncatedSvdOptions {
    fn default() -> Self {
        Self {
            power_iters: 10,
            oversample: 8,
            seed: 0x5eed_5bd0,
        }
    }
}

/// Rank-`r` SVD by randomized subspace iteration with QR after every pass.
pub fn truncated_svd(a: &DenseMatrix, r: usize, opts: TruncatedSvdOptions) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let kmax = m.min(n);
    if r == 0 || r > kmax {
        return Err(Error::RankOutOfRange { rank: r, max: kmax });
    }
    if r > SMALL_SVD_CAP {
        return Err(Error::CapExceeded {
            cap: SMALL_SVD_CAP,
            got: r,
        });
    }
    let width = (r + opts.oversample).min(kmax).min(SMALL_SVD_CAP);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let probe = DenseMatrix::random_gaussian(n, width, &mut rng);
    let mut q = qr_thin(&matmul(a, &probe)?)?.0;
    for _ in 0..opts.power_iters {
        let z = qr_thin(&matmul_tn(a, &q)?)?.0;
        q = qr_thin(&matmul(a, &z)?)?.0;
    }
    let b = matmul_tn(&q, a)?;
    let small = svd_small(&b)?;
    let mut out = SvdResult {
        left: matmul(&q, &small.left)?,
        singulars: small.singulars,
        right: small.right,
    }
    .truncate(r);
    apply_sign_convention(&mut out);
    Ok(out)
}
