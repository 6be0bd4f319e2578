use crate::error::{dim_mismatch, Result};
use crate::linalg::DenseMatrix;

/// Thin Householder QR: `a = q * r` with `q` (m×n) orthonormal columns and
/// `r` (n×n) upper triangular with a nonnegative diagonal.
///
/// Rank-deficient input yields zero diagonal entries in `r`; `q` stays
/// orthonormal regardless.
pub fn qr_thin(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(dim_mismatch("qr_thin", format!("rows >= cols ({n})"), m));
    }
    let mut work = a.clone();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);

    for k in 0..n {
        let norm_x = (k..m).map(|i| work.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            reflectors.push(None);
            continue;
        }
        let x0 = work.get(k, k);
        let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
        let mut v: Vec<f64> = (k..m).map(|i| work.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(None);
            continue;
        }
        v.iter_mut().for_each(|t| *t /= vnorm);
        apply_reflector(&mut work, &v, k, k);
        // Clean the annihilated part of column k.
        work.set(k, k, alpha);
        for i in k + 1..m {
            work.set(i, k, 0.0);
        }
        reflectors.push(Some(v));
    }

    // Accumulate Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    let mut q = DenseMatrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for k in (0..n).rev() {
        if let Some(v) = &reflectors[k] {
            apply_reflector(&mut q, v, k, 0);
        }
    }

    let mut r = DenseMatrix::from_fn(n, n, |i, j| if j >= i { work.get(i, j) } else { 0.0 });
    for k in 0..n {
        if r.get(k, k) < 0.0 {
            for j in k..n {
                r.set(k, j, -r.get(k, j));
            }
            q.scale_column(k, -1.0);
        }
    }
    Ok((q, r))
}

/// Apply `I - 2 v vᵀ` (acting on rows `row0..`) to columns `col0..` of `a`.
fn apply_reflector(a: &mut DenseMatrix, v: &[f64], row0: usize, col0: usize) {
    let cols = a.cols();
    for j in col0..cols {
        let mut s = 0.0;
        for (t, &vi) in v.iter().enumerate() {
            s += vi * a.get(row0 + t, j);
        }
        if s == 0.0 {
            continue;
        }
        let s2 = 2.0 * s;
        for (t, &vi) in v.iter().enumerate() {
            let idx = row0 + t;
            a.set(idx, j, a.get(idx, j) - s2 * vi);
        }
    }
}
