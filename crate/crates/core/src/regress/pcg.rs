//! Jacobi-preconditioned conjugate gradient.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kernels;
use crate::regress::weights::WeightState;

/// A symmetric positive-definite system `A x = b` available through products.
pub trait LinearSystem {
    fn dim(&self) -> usize;
    fn apply(&self, v: &DVector<f64>) -> DVector<f64>;
    fn diagonal(&self) -> DVector<f64>;
    fn rhs(&self) -> DVector<f64>;
}

/// `A = XᵀWX + δΓ`, `b = XᵀWy`, applied as `Xᵀ(W(Xv)) + δΓv` without forming `A`.
pub struct RidgeSystem<'a> {
    pub data: &'a Dataset,
    pub weights: &'a WeightState,
    pub delta: f64,
}

impl LinearSystem for RidgeSystem<'_> {
    fn dim(&self) -> usize {
        self.data.p()
    }

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut xv = kernels::matvec(self.data.x(), v.as_slice());
        xv.component_mul_assign(&self.weights.w);
        let mut out = kernels::matvec_t(self.data.x(), xv.as_slice());
        for ((o, g), vj) in out.iter_mut().zip(self.weights.gamma.iter()).zip(v.iter()) {
            *o += self.delta * g * vj;
        }
        out
    }

    fn diagonal(&self) -> DVector<f64> {
        let x = self.data.x();
        DVector::from_fn(x.ncols(), |j, _| {
            let col = x.column(j);
            let s: f64 = col.iter().zip(self.weights.w.iter()).map(|(v, w)| w * v * v).sum();
            s + self.delta * self.weights.gamma[j]
        })
    }

    fn rhs(&self) -> DVector<f64> {
        let wy = self.data.y().component_mul(&self.weights.w);
        kernels::matvec_t(self.data.x(), wy.as_slice())
    }
}

/// Explicit dense system, mostly for testing.
pub struct DenseSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LinearSystem for DenseSystem {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.a * v
    }

    fn diagonal(&self) -> DVector<f64> {
        self.a.diagonal()
    }

    fn rhs(&self) -> DVector<f64> {
        self.b.clone()
    }
}

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub initial_residual: f64,
    pub residual: f64,
    /// Whether the residual target was reached.
    pub converged: bool,
}

/// Runs at most `max_iter` steps from `x0`, stopping once
/// `‖b - Ax‖ ≤ rtol ‖b‖`.
pub fn pcg_solve(system: &impl LinearSystem, x0: &DVector<f64>, max_iter: usize, rtol: f64) -> Result<PcgOutcome> {
    if x0.len() != system.dim() {
        return Err(Error::Dimension(format!("x0 has {} entries, system has {}", x0.len(), system.dim())));
    }
    let b = system.rhs();
    let target = rtol * b.norm();
    let inv_diag = system.diagonal().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 });

    let mut x = x0.clone();
    let mut r = &b - system.apply(&x);
    let initial_residual = r.norm();
    let mut residual = initial_residual;
    if residual <= target || max_iter == 0 {
        return Ok(PcgOutcome { x, iterations: 0, initial_residual, residual, converged: residual <= target });
    }
    let mut z = r.component_mul(&inv_diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut iterations = 0;
    for k in 1..=max_iter {
        iterations = k;
        let ap = system.apply(&p);
        let curvature = p.dot(&ap);
        if !(curvature > 0.0) {
            if curvature == 0.0 {
                break;
            }
            return Err(Error::Numerical(format!("operator is not positive definite (pᵀAp = {curvature})")));
        }
        let alpha = rz / curvature;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        residual = r.norm();
        if !residual.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("conjugate gradient diverged at step {k}")));
        }
        if residual <= target {
            break;
        }
        z = r.component_mul(&inv_diag);
        let rz_next = r.dot(&z);
        p *= rz_next / rz;
        p += &z;
        rz = rz_next;
    }
    Ok(PcgOutcome { x, iterations, initial_residual, residual, converged: residual <= target })
}
