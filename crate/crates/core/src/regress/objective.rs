use nalgebra::DVector;

use crate::dataset::Dataset;
use crate::kernels;
use crate::norm::{dual_norm, NormKind};

/// `Σᵢ (|yᵢ - xᵢᵀβ| + δ‖β‖∗)²`, the total worst-case squared error.
pub fn objective(beta: &DVector<f64>, data: &Dataset, delta: f64, norm: NormKind) -> f64 {
    let pred = kernels::matvec(data.x(), beta.as_slice());
    let shift = delta * dual_norm(beta.as_slice(), norm);
    data.y().iter().zip(pred.iter()).map(|(y, f)| ((y - f).abs() + shift).powi(2)).sum()
}

pub fn objective_linf(beta: &DVector<f64>, data: &Dataset, delta: f64) -> f64 {
    objective(beta, data, delta, NormKind::Linf)
}

pub fn objective_l2(beta: &DVector<f64>, data: &Dataset, delta: f64) -> f64 {
    objective(beta, data, delta, NormKind::L2)
}
