//! Adversarially trained logistic regression.
//!
//! The worst-case logistic risk `(1/n) Σ h(yᵢxᵢᵀβ - δ‖β‖∗)` is minimised
//! through the smooth problem `min R(β, t) = (1/n) Σ h(yᵢxᵢᵀβ - ρt)` subject to
//! `ρt ≥ δ‖β‖∗`, whose gradient is Lipschitz with constant at most
//! `½ max(λ_max(XᵀX/n), ρ²)`.

pub mod cone;
pub mod risk;
pub mod solvers;

pub use cone::{project, project_l1_cone, project_l2_cone, ConeSpec, ExtendedPoint};
pub use risk::{adversarial_risk, choose_rho, risk_value, risk_value_and_grad};
pub use solvers::{
    fgsm_gradient, solve_apgd, solve_fgsm_baseline, solve_pgd, solve_pgd_linesearch, solve_saga, solve_saga_inspect,
    solve_sgd, SagaState,
};
