//! Numerically careful scalar link functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

const LOGISTIC_CUTOFF: f64 = 35.0;
/// Below this argument the Gaussian CDF is evaluated by its tail expansion.
const PROBIT_TAIL: f64 = -30.0;

/// `σ(x) = 1 / (1 + e^{-x})`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log σ(x) = -log1p(e^{-x})`, with asymptotic forms beyond |x| > 35.
pub fn log_sigmoid(x: f64) -> f64 {
    if x > LOGISTIC_CUTOFF {
        -(-x).exp()
    } else if x < -LOGISTIC_CUTOFF {
        x
    } else {
        -(-x).exp().ln_1p()
    }
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF `Φ(z)`.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Asymptotic series `1 - 1/z² + 3/z⁴ - 15/z⁶ + 105/z⁸` for `Φ(z)·(-z)/φ(z)`.
fn tail_series(z: f64) -> f64 {
    let w = 1.0 / (z * z);
    1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)))
}

/// `log Φ(z)`, finite for every finite `z`.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z < PROBIT_TAIL {
        -0.5 * z * z - (-z).ln() - 0.5 * (2.0 * PI).ln() + tail_series(z).ln()
    } else if z > 5.0 {
        // Φ(z) = 1 - Φ(-z) with Φ(-z) tiny.
        (-normal_cdf(-z)).ln_1p()
    } else {
        normal_cdf(z).ln()
    }
}

/// Inverse Mills ratio `φ(z) / Φ(z)`.
pub fn inverse_mills(z: f64) -> f64 {
    if z < PROBIT_TAIL {
        -z / tail_series(z)
    } else {
        normal_pdf(z) / normal_cdf(z)
    }
}
