use nalgebra::DVector;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kernels;
use crate::norm::NormKind;

/// Minimiser of `Σₜ (aₜ² + ε)/ηₜ` over the open simplex: `ηₜ = ãₜ / Σ ã` with
/// `ãₜ = sqrt(aₜ² + ε)`. At the minimum the value is `(Σ ã)²`.
pub fn eta_trick_weights(a: &[f64], eps: f64) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(Error::InvalidInput("eta trick needs at least one term".into()));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput(format!("eps must be >= 0, got {eps}")));
    }
    let smoothed: Vec<f64> = a.iter().map(|v| (v * v + eps).sqrt()).collect();
    if smoothed.contains(&0.0) {
        return Err(Error::InvalidInput("eta trick with eps = 0 requires all terms to be non-zero".into()));
    }
    let total: f64 = smoothed.iter().sum();
    Ok(smoothed.into_iter().map(|v| v / total).collect())
}

/// Sample weights `w`, parameter weights `γ` and the smoothing `ε` of the
/// reweighted ridge problem `Σ wᵢ(yᵢ - xᵢᵀβ)² + δ Σ γⱼβⱼ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    pub w: DVector<f64>,
    pub gamma: DVector<f64>,
    pub eps: f64,
}

impl WeightState {
    /// Unit weights, the starting point of the outer loop.
    pub fn ones(n: usize, p: usize, eps: f64) -> Self {
        Self { w: DVector::from_element(n, 1.0), gamma: DVector::from_element(p, 1.0), eps }
    }

    pub fn is_valid(&self) -> bool {
        self.w.iter().chain(self.gamma.iter()).all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Weights of the ridge problem that majorises the adversarial objective and
/// touches it at `beta`.
///
/// Per sample, the η-trick with terms `|rᵢ|` and `δ|βⱼ|` gives
/// `Sᵢ = r̃ᵢ + δ Σⱼ b̃ⱼ`, `wᵢ = Sᵢ / r̃ᵢ` and, summed over samples,
/// `γⱼ = (Σᵢ Sᵢ) / b̃ⱼ`, where tildes denote `sqrt(·² + ε)`. For ℓ2 attacks the
/// parameter block is the single term `δ‖β‖₂`.
pub fn update_weights(beta: &DVector<f64>, data: &Dataset, delta: f64, norm: NormKind, eps: f64) -> Result<WeightState> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("update_weights requires eps > 0".into()));
    }
    let pred = kernels::matvec(data.x(), beta.as_slice());
    let r_smooth: Vec<f64> = data.y().iter().zip(pred.iter()).map(|(y, f)| ((y - f).powi(2) + eps).sqrt()).collect();
    let (penalty, gamma) = match norm {
        NormKind::Linf => {
            let b_smooth: Vec<f64> = beta.iter().map(|b| (b * b + eps).sqrt()).collect();
            let penalty = delta * b_smooth.iter().sum::<f64>();
            (penalty, Some(b_smooth))
        }
        NormKind::L2 => (delta * (beta.norm_squared() + eps).sqrt(), None),
    };
    let scales: Vec<f64> = r_smooth.iter().map(|r| r + penalty).collect();
    let total: f64 = scales.iter().sum();
    let w = DVector::from_iterator(r_smooth.len(), scales.iter().zip(&r_smooth).map(|(s, r)| s / r));
    let gamma = match gamma {
        Some(b) => DVector::from_iterator(b.len(), b.iter().map(|bj| total / bj)),
        None => DVector::from_element(beta.len(), total / (beta.norm_squared() + eps).sqrt()),
    };
    Ok(WeightState { w, gamma, eps })
}
