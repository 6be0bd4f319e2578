//! The symmetric lift: `W = [U; V]`, `Z = WWᵀ`, and
//! `f̂(Z) = ½ f(Z₁₂) + ½ f(Z₂₁ᵀ)` on the off-diagonal blocks.

use crate::error::{dim_mismatch, Result};
use crate::linalg::DenseMatrix;
use crate::objectives::Objective;
use crate::solver::bfgd::step_from_grad;
use crate::solver::FactorPair;

fn split<O: Objective + ?Sized>(obj: &O, w: &DenseMatrix, op: &'static str) -> Result<FactorPair> {
    let (m, n) = obj.shape();
    if w.rows() != m + n {
        return Err(dim_mismatch(op, format!("{} rows", m + n), format!("{} rows", w.rows())));
    }
    FactorPair::from_stacked(w, m)
}

/// `∇_W f̂(WWᵀ) = [∇f(UVᵀ)·V; ∇f(UVᵀ)ᵀ·U]`.
pub fn lifted_gradient<O: Objective + ?Sized>(obj: &O, w: &DenseMatrix) -> Result<DenseMatrix> {
    let pair = split(obj, w, "lifted_gradient")?;
    let g = obj.grad(&pair.product())?;
    let (gu, gv) = crate::objectives::factor_gradients_from(&g, &pair)?;
    gu.vstack(&gv)
}

/// One FGD step `W − η·∇_W f̂(WWᵀ)`.
pub fn lifted_fgd_step<O: Objective + ?Sized>(w: &DenseMatrix, obj: &O, eta: f64) -> Result<DenseMatrix> {
    let pair = split(obj, w, "lifted_fgd_step")?;
    let g = obj.grad(&pair.product())?;
    let (u, v, _) = step_from_grad(&pair, &g, None, eta)?;
    u.vstack(&v)
}

fn check_square<O: Objective + ?Sized>(obj: &O, z: &DenseMatrix, op: &'static str) -> Result<(usize, usize)> {
    let (m, n) = obj.shape();
    if z.shape() != (m + n, m + n) {
        return Err(dim_mismatch(op, format!("{0}x{0}", m + n), format!("{}x{}", z.rows(), z.cols())));
    }
    Ok((m, n))
}

fn blocks(z: &DenseMatrix, m: usize, n: usize) -> (DenseMatrix, DenseMatrix) {
    let upper = DenseMatrix::from_fn(m, n, |i, j| z.get(i, m + j));
    let lower_t = DenseMatrix::from_fn(m, n, |i, j| z.get(m + j, i));
    (upper, lower_t)
}

/// `f̂(Z)` for an arbitrary `(m+n)×(m+n)` matrix `Z`.
pub fn lifted_value<O: Objective + ?Sized>(obj: &O, z: &DenseMatrix) -> Result<f64> {
    let (m, n) = check_square(obj, z, "lifted_value")?;
    let (b, ct) = blocks(z, m, n);
    Ok(0.5 * obj.value(&b)? + 0.5 * obj.value(&ct)?)
}

/// `∇f̂(Z) = [0, ½∇f(Z₁₂); ½∇f(Z₂₁ᵀ)ᵀ, 0]`.
pub fn lifted_objective_grad<O: Objective + ?Sized>(obj: &O, z: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = check_square(obj, z, "lifted_objective_grad")?;
    let (b, ct) = blocks(z, m, n);
    let gb = obj.grad(&b)?;
    let gc = obj.grad(&ct)?;
    let mut out = DenseMatrix::zeros(m + n, m + n);
    for i in 0..m {
        for j in 0..n {
            out.set(i, m + j, 0.5 * gb.get(i, j));
            out.set(m + j, i, 0.5 * gc.get(i, j));
        }
    }
    Ok(out)
}
