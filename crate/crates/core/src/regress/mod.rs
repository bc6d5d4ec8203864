//! Adversarially trained linear regression.
//!
//! The objective `Σ (|yᵢ - xᵢᵀβ| + δ‖β‖∗)²` is minimised by repeatedly solving
//! a weighted ridge problem that majorises it (η-trick reweighting).

pub mod irrr;
pub mod objective;
pub mod pcg;
pub mod ridge;
pub mod weights;

pub use irrr::{solve_icg, solve_irrr, DEFAULT_INNER_ITER};
pub use objective::{objective, objective_l2, objective_linf};
pub use pcg::{pcg_solve, DenseSystem, LinearSystem, PcgOutcome, RidgeSystem};
pub use ridge::{ridge_solve, ridge_solve_dual, ridge_solve_primal};
pub use weights::{eta_trick_weights, update_weights, WeightState};
