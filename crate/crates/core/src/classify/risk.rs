use nalgebra::DVector;

use crate::attack::AttackSpec;
use crate::classify::cone::{ConeSpec, ExtendedPoint};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kernels;
use crate::loss::{logistic, logistic_deriv};
use crate::norm::dual_norm;

/// `ρ = sqrt((1/n) Σᵢ ‖xᵢ‖²)`, so that `ρ²` is the trace of `(1/n) XᵀX`.
pub fn choose_rho(data: &Dataset) -> Result<f64> {
    let sq: f64 = data.x().iter().map(|v| v * v).sum();
    let rho = (sq / data.n() as f64).sqrt();
    if rho == 0.0 {
        return Err(Error::InvalidInput("design matrix is identically zero".into()));
    }
    Ok(rho)
}

/// `yᵢ xᵢᵀβ` for every sample.
pub(crate) fn margins(data: &Dataset, beta: &DVector<f64>) -> DVector<f64> {
    let mut m = kernels::matvec(data.x(), beta.as_slice());
    m.component_mul_assign(data.y());
    m
}

/// Smooth risk `R(β, t) = (1/n) Σ h(yᵢxᵢᵀβ - ρt)` and its gradient.
pub fn risk_value_and_grad(w: &ExtendedPoint, data: &Dataset, cone: &ConeSpec) -> (f64, ExtendedPoint) {
    let n = data.n() as f64;
    let mut z = margins(data, &w.beta);
    let shift = cone.rho * w.t;
    let mut value = 0.0;
    let mut dsum = 0.0;
    for (zi, yi) in z.iter_mut().zip(data.y().iter()) {
        let arg = *zi - shift;
        value += logistic(arg);
        let d = logistic_deriv(arg);
        dsum += d;
        // reuse the buffer for h'(zᵢ) yᵢ
        *zi = d * yi;
    }
    let mut gbeta = kernels::matvec_t(data.x(), z.as_slice());
    gbeta /= n;
    (value / n, ExtendedPoint::new(gbeta, -cone.rho * dsum / n))
}

pub fn risk_value(w: &ExtendedPoint, data: &Dataset, cone: &ConeSpec) -> f64 {
    let z = margins(data, &w.beta);
    let shift = cone.rho * w.t;
    z.iter().map(|zi| logistic(zi - shift)).sum::<f64>() / data.n() as f64
}

/// The non-smooth β-space objective `(1/n) Σ h(yᵢxᵢᵀβ - δ‖β‖∗)`, i.e. the
/// mean worst-case logistic loss.
pub fn adversarial_risk(beta: &DVector<f64>, data: &Dataset, spec: AttackSpec) -> f64 {
    let z = margins(data, beta);
    let shift = spec.delta * dual_norm(beta.as_slice(), spec.norm);
    z.iter().map(|zi| logistic(zi - shift)).sum::<f64>() / data.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Task;
    use crate::norm::NormKind;
    use nalgebra::DMatrix;
    use rand::Rng;

    fn random_data(seed: u64, n: usize, p: usize) -> Dataset {
        let mut rng = crate::rng::stream(seed, 0);
        let x = DMatrix::from_fn(n, p, |_, _| rng.random_range(-2.0..2.0));
        let y = DVector::from_fn(n, |_, _| if rng.random_bool(0.5) { 1.0 } else { -1.0 });
        Dataset::new(x, y, Task::BinaryClassification).unwrap()
    }

    #[test]
    fn rho_examples() {
        let d = Dataset::new(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, -1.0]), Task::BinaryClassification).unwrap();
        assert!((choose_rho(&d).unwrap() - 1.0).abs() < 1e-15);
        let d = Dataset::new(DMatrix::from_row_slice(1, 2, &[3.0, 4.0]), DVector::from_vec(vec![1.0]), Task::BinaryClassification).unwrap();
        assert!((choose_rho(&d).unwrap() - 5.0).abs() < 1e-15);
        let d = Dataset::new(DMatrix::zeros(2, 2), DVector::from_vec(vec![1.0, -1.0]), Task::BinaryClassification).unwrap();
        assert!(choose_rho(&d).is_err());
    }

    #[test]
    fn rho_squared_is_second_moment_trace() {
        let d = random_data(4, 37, 6);
        let m = d.x().transpose() * d.x() / d.n() as f64;
        let rho = choose_rho(&d).unwrap();
        assert!((rho * rho - m.trace()).abs() <= 1e-12 * m.trace());
    }

    #[test]
    fn value_at_origin() {
        let d = random_data(1, 10, 3);
        let cone = ConeSpec::new(NormKind::Linf, 0.1, 2.0).unwrap();
        let (v, g) = risk_value_and_grad(&ExtendedPoint::zeros(3), &d, &cone);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((g.t - 1.0).abs() < 1e-15); // ρ/2
    }

    #[test]
    fn large_margins_vanish() {
        let d = Dataset::new(DMatrix::from_row_slice(2, 1, &[1.0, -1.0]), DVector::from_vec(vec![1.0, -1.0]), Task::BinaryClassification).unwrap();
        let cone = ConeSpec::new(NormKind::L2, 0.0, 1.0).unwrap();
        let w = ExtendedPoint::new(DVector::from_vec(vec![1e3]), 0.0);
        assert!(risk_value_and_grad(&w, &d, &cone).0 < 1e-300);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let d = random_data(2, 25, 4);
        let mut rng = crate::rng::stream(3, 3);
        for norm in [NormKind::L2, NormKind::Linf] {
            let cone = ConeSpec::new(norm, 0.3, 1.7).unwrap();
            for _ in 0..20 {
                let w = ExtendedPoint::new(DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0)), rng.random_range(-1.0..1.0));
                let (_, g) = risk_value_and_grad(&w, &d, &cone);
                let v = w.to_vector();
                let gv = g.to_vector();
                let fd = DVector::from_fn(v.len(), |k, _| {
                    let h = 1e-6;
                    let mut a = v.clone();
                    let mut b = v.clone();
                    a[k] += h;
                    b[k] -= h;
                    (risk_value(&ExtendedPoint::from_vector(&a), &d, &cone) - risk_value(&ExtendedPoint::from_vector(&b), &d, &cone)) / (2.0 * h)
                });
                assert!((&fd - &gv).norm() <= 1e-5 * gv.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn smooth_risk_equals_adversarial_risk_on_active_constraint() {
        let d = random_data(5, 30, 3);
        let beta = DVector::from_vec(vec![0.4, -1.2, 0.3]);
        for norm in [NormKind::L2, NormKind::Linf] {
            let cone = ConeSpec::new(norm, 0.2, 1.3).unwrap();
            let w = ExtendedPoint::new(beta.clone(), cone.tight_t(beta.as_slice()));
            let spec = AttackSpec::new(norm, 0.2).unwrap();
            let a = risk_value(&w, &d, &cone);
            let b = adversarial_risk(&beta, &d, spec);
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}
