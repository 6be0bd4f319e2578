use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{power_iterate, DenseMatrix, SPECTRAL_NORM_MAX_ITERS, SPECTRAL_NORM_TOL};
use crate::objectives::{Objective, Smoothness};
use crate::operators::{LinearMap, SensingMap};

/// `f(X) = ½‖y − A(X)‖²`.
///
/// With a [`SensingMap::Mask`] map this is masked matrix completion.
#[derive(Debug, Clone)]
pub struct LeastSquaresSensing {
    map: SensingMap,
    y: Vec<f64>,
    smoothness: Smoothness,
}

impl LeastSquaresSensing {
    pub fn new(map: SensingMap, y: Vec<f64>) -> Result<Self> {
        if y.len() != map.num_measurements() {
            return Err(dim_mismatch(
                "LeastSquaresSensing::new",
                map.num_measurements(),
                y.len(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LeastSquaresSensing::new"));
        }
        let smoothness = estimate_smoothness(&map);
        Ok(Self { map, y, smoothness })
    }

    pub fn map(&self) -> &SensingMap {
        &self.map
    }

    pub fn observations(&self) -> &[f64] {
        &self.y
    }

    fn residual(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        let ax = self.map.apply(x)?;
        Ok(self.y.iter().zip(ax).map(|(y, a)| y - a).collect())
    }
}

/// σ₁(A)² via power iteration on `X ↦ A*(A(X))`. Masks are projections, so
/// their constant is exactly 1.
fn estimate_smoothness(map: &SensingMap) -> Smoothness {
    if let SensingMap::Mask(mask) = map {
        return Smoothness::exact(if mask.is_empty() { 0.0 } else { 1.0 });
    }
    let (m, n) = map.shape();
    let est = power_iterate(
        m * n,
        |v| {
            let x = DenseMatrix::new(m, n, v.to_vec()).expect("finite probe");
            let ax = map.apply(&x).expect("shape");
            let nrm = ax.iter().map(|t| t * t).sum::<f64>().sqrt();
            (map.adjoint(&ax).expect("length").into_data(), nrm)
        },
        SPECTRAL_NORM_TOL,
        SPECTRAL_NORM_MAX_ITERS,
    );
    if est.converged {
        Smoothness::exact(est.value * est.value)
    } else {
        Smoothness {
            value: map.norm_sq_upper_bound(),
            converged: false,
        }
    }
}

impl Objective for LeastSquaresSensing {
    fn shape(&self) -> (usize, usize) {
        self.map.shape()
    }

    fn value(&self, x: &DenseMatrix) -> Result<f64> {
        self.check_point(x, "LeastSquaresSensing::value")?;
        Ok(0.5 * self.residual(x)?.iter().map(|r| r * r).sum::<f64>())
    }

    fn grad(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(self.value_and_grad(x)?.1)
    }

    fn value_and_grad(&self, x: &DenseMatrix) -> Result<(f64, DenseMatrix)> {
        self.check_point(x, "LeastSquaresSensing::grad")?;
        let mut r = self.residual(x)?;
        let value = 0.5 * r.iter().map(|t| t * t).sum::<f64>();
        r.iter_mut().for_each(|t| *t = -*t);
        Ok((value, self.map.adjoint(&r)?))
    }

    fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    fn strong_convexity(&self) -> Option<f64> {
        match &self.map {
            SensingMap::Mask(mask) if mask.len() == self.map.shape().0 * self.map.shape().1 => {
                Some(1.0)
            }
            _ => None,
        }
    }
}
