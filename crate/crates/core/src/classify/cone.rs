//! The feasible cone `C = {(β, t) : ρt ≥ δ‖β‖∗}` and Euclidean projection
//! onto it for the ℓ2 (self-dual) and ℓ1 (dual of ℓ∞) cases.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::norm::{dual_norm, NormKind};

/// Extended variable `w = (β, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPoint {
    pub beta: DVector<f64>,
    pub t: f64,
}

impl ExtendedPoint {
    pub fn new(beta: DVector<f64>, t: f64) -> Self {
        Self { beta, t }
    }

    pub fn zeros(p: usize) -> Self {
        Self { beta: DVector::zeros(p), t: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.beta.len() + 1
    }

    pub fn dot(&self, other: &ExtendedPoint) -> f64 {
        self.beta.dot(&other.beta) + self.t * other.t
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &ExtendedPoint) {
        self.beta.axpy(a, &other.beta, 1.0);
        self.t += a * other.t;
    }

    pub fn diff(&self, other: &ExtendedPoint) -> ExtendedPoint {
        ExtendedPoint { beta: &self.beta - &other.beta, t: self.t - other.t }
    }

    /// Flattened `(β₁, …, β_p, t)`.
    pub fn to_vector(&self) -> DVector<f64> {
        let p = self.beta.len();
        DVector::from_fn(p + 1, |i, _| if i < p { self.beta[i] } else { self.t })
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let p = v.len() - 1;
        Self { beta: v.rows(0, p).into_owned(), t: v[p] }
    }
}

/// Norm of the attack, radius δ and the scale ρ coupling `t` to the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    pub norm: NormKind,
    pub delta: f64,
    pub rho: f64,
}

impl ConeSpec {
    pub fn new(norm: NormKind, delta: f64, rho: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidInput(format!("delta must be >= 0, got {delta}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be > 0, got {rho}")));
        }
        Ok(Self { norm, delta, rho })
    }

    /// `ρt - δ‖β‖∗`; non-negative on the cone.
    pub fn slack(&self, w: &ExtendedPoint) -> f64 {
        self.rho * w.t - self.delta * dual_norm(w.beta.as_slice(), self.norm)
    }

    pub fn contains(&self, w: &ExtendedPoint) -> bool {
        self.slack(w) >= 0.0
    }

    /// Smallest feasible `t` for a given `β`.
    pub fn tight_t(&self, beta: &[f64]) -> f64 {
        self.delta * dual_norm(beta, self.norm) / self.rho
    }
}

/// Euclidean projection onto the cone.
pub fn project(w: &ExtendedPoint, cone: &ConeSpec) -> ExtendedPoint {
    let mut out = w.clone();
    let mut scratch = Vec::new();
    project_in_place(&mut out, cone, &mut scratch);
    out
}

/// In-place projection; `scratch` is reused across calls by per-sample solvers.
pub fn project_in_place(w: &mut ExtendedPoint, cone: &ConeSpec, scratch: &mut Vec<f64>) {
    match cone.norm {
        NormKind::L2 => project_l2_in_place(w, cone),
        NormKind::Linf => project_l1_in_place(w, cone, scratch),
    }
}

/// Projection onto `{ρt ≥ δ‖β‖₂}`.
pub fn project_l2_cone(w: &ExtendedPoint, cone: &ConeSpec) -> ExtendedPoint {
    let mut out = w.clone();
    project_l2_in_place(&mut out, cone);
    out
}

/// Projection onto `{ρt ≥ δ‖β‖₁}`.
pub fn project_l1_cone(w: &ExtendedPoint, cone: &ConeSpec) -> ExtendedPoint {
    let mut out = w.clone();
    project_l1_in_place(&mut out, cone, &mut Vec::new());
    out
}

fn project_l2_in_place(w: &mut ExtendedPoint, cone: &ConeSpec) {
    let (delta, rho) = (cone.delta, cone.rho);
    let nb = w.beta.norm();
    if rho * w.t >= delta * nb {
        return;
    }
    if delta == 0.0 {
        w.t = 0.0;
        return;
    }
    let s = rho * nb + delta * w.t;
    if s <= 0.0 {
        w.beta.fill(0.0);
        w.t = 0.0;
        return;
    }
    let t = delta * s / (delta * delta + rho * rho);
    // nb > 0 here: nb = 0 is either feasible or caught by the apex test
    w.beta *= rho * t / (delta * nb);
    w.t = t;
}

/// Solves `δ Σⱼ (|β̃ⱼ| - δλ)₊ = ρ(t̃ + ρλ)` for λ by scanning the sorted
/// breakpoints, then soft-thresholds β̃ by δλ and shifts t̃ by ρλ.
fn project_l1_in_place(w: &mut ExtendedPoint, cone: &ConeSpec, scratch: &mut Vec<f64>) {
    let (delta, rho) = (cone.delta, cone.rho);
    let l1: f64 = w.beta.iter().map(|b| b.abs()).sum();
    if rho * w.t >= delta * l1 {
        return;
    }
    if delta == 0.0 {
        w.t = 0.0;
        return;
    }
    scratch.clear();
    scratch.extend(w.beta.iter().map(|b| b.abs()));
    scratch.sort_unstable_by(|a, b| b.total_cmp(a));

    // With the k largest magnitudes active the equation is linear in λ:
    //   δ(S_k - kδλ) = ρt̃ + ρ²λ  ⇒  λ = (δS_k - ρt̃) / (kδ² + ρ²),
    // valid when a_{k+1} ≤ δλ < a_k.
    let mut lambda = None;
    let mut cumsum = 0.0;
    for k in 0..scratch.len() {
        let a_k = scratch[k];
        if a_k <= 0.0 {
            break;
        }
        cumsum += a_k;
        // λ > 0 outside the cone; the clamp absorbs rounding between `l1` and `cumsum`
        let lam = ((delta * cumsum - rho * w.t) / ((k + 1) as f64 * delta * delta + rho * rho)).max(0.0);
        let next = scratch.get(k + 1).copied().unwrap_or(0.0);
        if delta * lam >= next {
            lambda = Some(lam);
            break;
        }
    }
    let lambda = match lambda {
        // Only the apex satisfies the equation with all coordinates inactive.
        Some(l) if delta * l < scratch[0] => l,
        _ => {
            w.beta.fill(0.0);
            w.t = 0.0;
            return;
        }
    };
    let shrink = delta * lambda;
    for b in w.beta.iter_mut() {
        *b = b.signum() * (b.abs() - shrink).max(0.0);
    }
    w.t += rho * lambda;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;
    use proptest::prelude::*;

    fn pt(beta: &[f64], t: f64) -> ExtendedPoint {
        ExtendedPoint::new(DVector::from_column_slice(beta), t)
    }

    #[test]
    fn l2_closed_form_example() {
        let cone = ConeSpec::new(NormKind::L2, 1.0, 1.0).unwrap();
        let p = project_l2_cone(&pt(&[3.0, 4.0], 0.0), &cone);
        assert!((p.t - 2.5).abs() < 1e-14);
        assert!((p.beta[0] - 1.5).abs() < 1e-14 && (p.beta[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn l2_identity_and_apex() {
        let cone = ConeSpec::new(NormKind::L2, 1.0, 1.0).unwrap();
        let w = pt(&[0.3, 0.4], 1.0);
        assert_eq!(project_l2_cone(&w, &cone), w);
        assert_eq!(project_l2_cone(&pt(&[0.0, 0.0], -1.0), &cone), pt(&[0.0, 0.0], 0.0));
    }

    #[test]
    fn l1_example() {
        let cone = ConeSpec::new(NormKind::Linf, 1.0, 1.0).unwrap();
        let p = project_l1_cone(&pt(&[2.0, -1.0], 0.5), &cone);
        assert!((p.t - 4.0 / 3.0).abs() < 1e-14);
        assert!((p.beta[0] - 7.0 / 6.0).abs() < 1e-14);
        assert!((p.beta[1] + 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn l1_identity_and_apex() {
        let cone = ConeSpec::new(NormKind::Linf, 1.0, 1.0).unwrap();
        let w = pt(&[0.5, -0.25], 1.0);
        assert_eq!(project_l1_cone(&w, &cone), w);
        assert_eq!(project_l1_cone(&pt(&[1.0, 1.0], -100.0), &cone), pt(&[0.0, 0.0], 0.0));
    }

    #[test]
    fn zero_radius_only_clips_t() {
        for norm in [NormKind::L2, NormKind::Linf] {
            let cone = ConeSpec::new(norm, 0.0, 2.0).unwrap();
            assert_eq!(project(&pt(&[1.0, -3.0], -2.0), &cone), pt(&[1.0, -3.0], 0.0));
        }
    }

    #[test]
    fn rejects_bad_cone() {
        assert!(ConeSpec::new(NormKind::L2, -1.0, 1.0).is_err());
        assert!(ConeSpec::new(NormKind::L2, 1.0, 0.0).is_err());
    }

    #[test]
    fn boundary_point_stays_put() {
        // ρt is below δ‖β‖₁ by one rounding error only
        let cone = ConeSpec::new(NormKind::Linf, 2.5273207158122495, 9.197947806638194).unwrap();
        let w = pt(&[-0.002871663840048888, 2.834483079129723, -2.2493985723195316], 1.3976875385919427);
        let p = project(&w, &cone);
        assert!(p.diff(&w).norm_squared().sqrt() <= 1e-12);
    }

    #[test]
    fn vector_round_trip() {
        let w = pt(&[1.0, 2.0], 3.0);
        assert_eq!(ExtendedPoint::from_vector(&w.to_vector()), w);
        assert_eq!(w.dim(), 3);
    }

    fn point() -> impl Strategy<Value = (Vec<f64>, f64, f64, f64)> {
        (
            proptest::collection::vec(-5.0f64..5.0, 1..8),
            -5.0f64..5.0,
            0.1f64..10.0,
            0.1f64..10.0,
        )
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent((beta, t, delta, rho) in point()) {
            for norm in [NormKind::L2, NormKind::Linf] {
                let cone = ConeSpec::new(norm, delta, rho).unwrap();
                let p = project(&pt(&beta, t), &cone);
                prop_assert!(cone.slack(&p) >= -1e-9 * (1.0 + p.t.abs()));
                let q = project(&p, &cone);
                prop_assert!(p.diff(&q).norm_squared().sqrt() <= 1e-10);
            }
        }

        #[test]
        fn l1_projection_activates_constraint((beta, t, delta, rho) in point()) {
            let cone = ConeSpec::new(NormKind::Linf, delta, rho).unwrap();
            let w = pt(&beta, t);
            let p = project(&w, &cone);
            if !cone.contains(&w) && p.t != 0.0 {
                prop_assert!(cone.slack(&p).abs() <= 1e-10 * (1.0 + p.t.abs()));
            }
        }

        #[test]
        fn projection_beats_random_feasible_points((beta, t, delta, rho) in point(), seed in 0u64..1000) {
            use rand::Rng;
            let mut rng = crate::rng::stream(seed, 9);
            for norm in [NormKind::L2, NormKind::Linf] {
                let cone = ConeSpec::new(norm, delta, rho).unwrap();
                let w = pt(&beta, t);
                let d = w.diff(&project(&w, &cone)).norm_squared();
                for _ in 0..200 {
                    let b: Vec<f64> = beta.iter().map(|&x| x + rng.random_range(-2.0..2.0)).collect();
                    let cand = pt(&b, cone.tight_t(&b) + rng.random_range(0.0..1.0));
                    prop_assert!(d <= w.diff(&cand).norm_squared() * (1.0 + 1e-12) + 1e-12);
                }
            }
        }
    }
}
