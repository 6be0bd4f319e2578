//! Self-contained dense linear algebra: products, thin QR, one-sided Jacobi
//! SVD, randomized truncated SVD and power-iteration spectral norms.

mod matrix;
mod norm;
mod qr;
mod svd;

pub use matrix::{matmul, matmul_nt, matmul_tn, matvec, matvec_t, DenseMatrix};
pub use norm::{
    spectral_norm, spectral_norm_estimate, PowerEstimate, SPECTRAL_NORM_MAX_ITERS,
    SPECTRAL_NORM_TOL,
};
pub(crate) use norm::power_iterate;
pub use qr::qr_thin;
pub use svd::{svd_small, truncated_svd, SvdResult, TruncatedSvdOptions, SMALL_SVD_CAP};
