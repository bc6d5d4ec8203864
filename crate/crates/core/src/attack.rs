//! Closed-form adversarial losses for linear models, the worst-case
//! perturbation that attains them, the default adversarial radius and the
//! radius above which the zero model is optimal.
//!
//! For a linear predictor the inner maximisation over `‖Δx‖ ≤ δ` reduces to a
//! shift of the prediction by `±δ‖β‖∗`, where `‖·‖∗` is the dual norm:
//! towards larger residual for regression, towards smaller margin for
//! classification.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::kernels;
use crate::loss::logistic;
use crate::norm::{dual_norm, primal_norm, Norm, NormKind};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub norm: NormKind,
    pub delta: f64,
}

impl AttackSpec {
    pub fn new(norm: NormKind, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidInput(format!("adversarial radius must be >= 0, got {delta}")));
        }
        Ok(Self { norm, delta })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(|y - xᵀβ| + δ‖β‖∗)²`.
pub fn adversarial_loss_regression(x: &[f64], y: f64, beta: &[f64], spec: AttackSpec) -> f64 {
    let r = (y - dot(x, beta)).abs() + spec.delta * dual_norm(beta, spec.norm);
    r * r
}

/// `h(y xᵀβ - δ‖β‖∗)` with the logistic `h`.
pub fn adversarial_loss_classification(x: &[f64], y: f64, beta: &[f64], spec: AttackSpec) -> f64 {
    logistic(y * dot(x, beta) - spec.delta * dual_norm(beta, spec.norm))
}

/// A perturbation with `‖Δx‖ ≤ δ` attaining the inner maximum.
///
/// Coordinates where `β` is zero are left unperturbed for ℓ∞ attacks; a zero
/// `β` gives a zero perturbation.
pub fn worst_case_perturbation(x: &[f64], y: f64, beta: &[f64], spec: AttackSpec, task: Task) -> Vec<f64> {
    let s = match task {
        Task::Regression => {
            let r = y - dot(x, beta);
            // any sign is optimal at r = 0
            if r >= 0.0 { -1.0 } else { 1.0 }
        }
        Task::BinaryClassification => -y,
    };
    match spec.norm {
        NormKind::Linf => beta
            .iter()
            .map(|&b| if b == 0.0 { 0.0 } else { spec.delta * s * b.signum() })
            .collect(),
        NormKind::L2 => {
            let nb = Norm::L2.of(beta);
            if nb == 0.0 {
                vec![0.0; beta.len()]
            } else {
                beta.iter().map(|&b| spec.delta * s * b / nb).collect()
            }
        }
    }
}

/// Monte-Carlo defaults for [`default_delta`].
pub const DEFAULT_MC_SAMPLES: usize = 1000;
pub const DEFAULT_PERCENTILE: f64 = 95.0;

/// Percentile of `‖Xᵀε‖ / ‖ε‖₁` (attack norm) over standard normal `ε`, the radius at
/// which pure-noise targets are fitted by the zero model with high
/// probability. Sample `k` uses its own random stream, so the result does
/// not depend on how the draws are scheduled.
pub fn default_delta(x: &DMatrix<f64>, norm: NormKind, mc_samples: usize, percentile: f64, seed: u64) -> Result<f64> {
    if mc_samples == 0 {
        return Err(Error::InvalidInput("default_delta needs at least one sample".into()));
    }
    if !(percentile > 0.0 && percentile < 100.0) {
        return Err(Error::InvalidInput(format!("percentile must lie in (0, 100), got {percentile}")));
    }
    let n = x.nrows();
    let mut ratios = kernels::map_indexed(mc_samples, |k| {
        let mut rng = rng::stream(seed, k as u64);
        let eps: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let xte = kernels::matvec_t(x, &eps);
        primal_norm(xte.as_slice(), norm) / Norm::L1.of(&eps)
    });
    ratios.sort_by(|a, b| a.total_cmp(b));
    Ok(nearest_rank(&ratios, percentile))
}

/// Nearest-rank percentile of sorted data.
fn nearest_rank(sorted: &[f64], percentile: f64) -> f64 {
    let rank = ((percentile / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// `‖Xᵀy‖ / ‖y‖₁` in the attack norm: for regression the zero model is
/// optimal exactly when `δ` is at least this value, since the directional
/// derivative at zero is `2(δ‖y‖₁‖d‖∗ - yᵀXd)`. Returns 0 for `y = 0`.
pub fn zero_solution_threshold(data: &Dataset, norm: NormKind) -> f64 {
    let y = data.y().as_slice();
    let l1 = Norm::L1.of(y);
    if l1 == 0.0 {
        return 0.0;
    }
    primal_norm(kernels::matvec_t(data.x(), y).as_slice(), norm) / l1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::logistic;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn lin(norm: NormKind, delta: f64) -> AttackSpec {
        AttackSpec::new(norm, delta).unwrap()
    }

    #[test]
    fn regression_examples() {
        // xᵀβ = 1, δ‖β‖₁ = 0.5
        let v = adversarial_loss_regression(&[1.0, 0.0], 2.0, &[1.0, 0.0], lin(NormKind::Linf, 0.5));
        assert!((v - 2.25).abs() < 1e-15);
        let v = adversarial_loss_regression(&[1.0, 2.0], 0.5, &[0.3, -0.7], lin(NormKind::Linf, 0.0));
        let r: f64 = 0.5 - (0.3 - 1.4);
        assert!((v - r * r).abs() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let spec0 = lin(NormKind::Linf, 0.0);
        let v = adversarial_loss_classification(&[1.0], 1.0, &[0.0], spec0);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        // xᵀβ = 0.5, δ‖β‖₁ = 0.2
        let v = adversarial_loss_classification(&[1.0], 1.0, &[0.5], lin(NormKind::Linf, 0.4));
        assert!((v - logistic(0.3)).abs() < 1e-15);
        let v = adversarial_loss_classification(&[1.0], 1.0, &[-800.0], spec0);
        assert!((v - 800.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_examples() {
        let d = worst_case_perturbation(&[0.0, 0.0], 1.0, &[1.0, -2.0], lin(NormKind::Linf, 0.1), Task::BinaryClassification);
        assert_eq!(d, vec![-0.1, 0.1]);
        // y > xᵀβ → Δx = -δβ/‖β‖₂
        let beta = [3.0, 4.0];
        let d = worst_case_perturbation(&[0.0, 0.0], 1.0, &beta, lin(NormKind::L2, 0.5), Task::Regression);
        assert!((d[0] + 0.3).abs() < 1e-15 && (d[1] + 0.4).abs() < 1e-15);
        let d = worst_case_perturbation(&[1.0, 1.0], 1.0, &[0.0, 0.0], lin(NormKind::L2, 0.5), Task::Regression);
        assert_eq!(d, vec![0.0, 0.0]);
        let d = worst_case_perturbation(&[1.0, 1.0], 1.0, &[0.0, 2.0], lin(NormKind::Linf, 0.5), Task::Regression);
        assert_eq!(d, vec![0.0, 0.5]);
    }

    #[test]
    fn default_delta_single_sample_row() {
        let x = DMatrix::from_element(1, 1, 1.0);
        for norm in [NormKind::L2, NormKind::Linf] {
            assert_eq!(default_delta(&x, norm, 100, 95.0, 3).unwrap(), 1.0);
        }
    }

    #[test]
    fn default_delta_is_homogeneous() {
        let x = DMatrix::from_fn(30, 6, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let a = default_delta(&x, NormKind::Linf, 300, 95.0, 11).unwrap();
        let b = default_delta(&(&x * 4.0), NormKind::Linf, 300, 95.0, 11).unwrap();
        assert_eq!(4.0 * a, b);
        let c = default_delta(&(&x * 2.5), NormKind::L2, 300, 95.0, 11).unwrap();
        let d = default_delta(&x, NormKind::L2, 300, 95.0, 11).unwrap();
        assert!((c - 2.5 * d).abs() <= 1e-12 * c);
    }

    #[test]
    fn default_delta_rejects_bad_args() {
        let x = DMatrix::from_element(2, 2, 1.0);
        assert!(default_delta(&x, NormKind::L2, 0, 95.0, 0).is_err());
        assert!(default_delta(&x, NormKind::L2, 10, 100.0, 0).is_err());
    }

    #[test]
    fn nearest_rank_percentile() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 95.0), 19.0);
        assert_eq!(nearest_rank(&v, 50.0), 10.0);
        assert_eq!(nearest_rank(&v, 1.0), 1.0);
    }

    #[test]
    fn threshold_examples() {
        let d = Dataset::new(DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, 1.0), Task::Regression).unwrap();
        assert_eq!(zero_solution_threshold(&d, NormKind::Linf), 1.0);
        let d = Dataset::new(DMatrix::from_element(2, 1, 1.0), DVector::from_vec(vec![1.0, -1.0]), Task::Regression).unwrap();
        assert_eq!(zero_solution_threshold(&d, NormKind::Linf), 0.0);
        let d = Dataset::new(DMatrix::from_element(2, 1, 1.0), DVector::zeros(2), Task::Regression).unwrap();
        assert_eq!(zero_solution_threshold(&d, NormKind::L2), 0.0);
        // Xᵀy = (2, -1), ‖y‖₁ = 2
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, -1.0]);
        let d = Dataset::new(x, DVector::from_vec(vec![1.0, 1.0]), Task::Regression).unwrap();
        assert_eq!(zero_solution_threshold(&d, NormKind::Linf), 1.0);
        assert!((zero_solution_threshold(&d, NormKind::L2) - 5f64.sqrt() / 2.0).abs() < 1e-15);
    }

    fn inputs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64, f64)> {
        (1usize..5).prop_flat_map(|p| {
            (
                proptest::collection::vec(-3.0f64..3.0, p),
                proptest::collection::vec(-3.0f64..3.0, p),
                -3.0f64..3.0,
                0.0f64..2.0,
            )
        })
    }

    proptest! {
        #[test]
        fn loss_is_attained_by_perturbation((x, beta, y, delta) in inputs()) {
            for norm in [NormKind::L2, NormKind::Linf] {
                let spec = lin(norm, delta);
                let dx = worst_case_perturbation(&x, y, &beta, spec, Task::Regression);
                prop_assert!(primal_norm_of(&dx, norm) <= delta * (1.0 + 1e-12));
                let xp: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let attacked = (y - dot(&xp, &beta)).powi(2);
                let closed = adversarial_loss_regression(&x, y, &beta, spec);
                prop_assert!((attacked - closed).abs() <= 1e-12 * closed.max(1.0));

                let label = if y >= 0.0 { 1.0 } else { -1.0 };
                let dx = worst_case_perturbation(&x, label, &beta, spec, Task::BinaryClassification);
                prop_assert!(primal_norm_of(&dx, norm) <= delta * (1.0 + 1e-12));
                let xp: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
                let attacked = logistic(label * dot(&xp, &beta));
                let closed = adversarial_loss_classification(&x, label, &beta, spec);
                prop_assert!((attacked - closed).abs() <= 1e-12 * closed.max(1.0));
            }
        }

        #[test]
        fn losses_grow_with_radius((x, beta, y, delta) in inputs(), extra in 0.0f64..1.0) {
            for norm in [NormKind::L2, NormKind::Linf] {
                let a = lin(norm, delta);
                let b = lin(norm, delta + extra);
                prop_assert!(adversarial_loss_regression(&x, y, &beta, a) <= adversarial_loss_regression(&x, y, &beta, b));
                prop_assert!(adversarial_loss_classification(&x, 1.0, &beta, a) <= adversarial_loss_classification(&x, 1.0, &beta, b));
            }
        }
    }

    fn primal_norm_of(v: &[f64], norm: NormKind) -> f64 {
        crate::norm::primal_norm(v, norm)
    }
}
