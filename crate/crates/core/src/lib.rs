//! Solvers for adversarial training of linear models.
//!
//! Classification is handled through a smooth reformulation over the
//! extended variable `(beta, t)` constrained to a cone, solved with projected
//! first-order methods ([`classify`]). Regression with squared loss is solved
//! by iteratively reweighted ridge regression ([`regress`]). The [`attack`]
//! module evaluates worst-case losses in closed form and provides the
//! default adversarial radius.
//!
//! Dense matrix-vector products and Monte-Carlo loops run on rayon when the
//! `parallel` feature is enabled (the default). Results are bitwise identical
//! with and without the feature.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod classify;
pub mod data;
mod dataset;
mod error;
mod fit;
pub mod kernels;
pub mod loss;
mod norm;
pub mod regress;
mod rng;
mod solver;
pub mod spectral;
pub mod suite;

pub use dataset::{Dataset, Task};
pub use error::{Error, Result};
pub use fit::{FitResult, SolveOptions, TracePoint};
pub use norm::{dual_norm, primal_norm, Norm, NormKind};
pub use solver::{fit, Solver};
pub use spectral::empirical_second_moment_lambda_max;

pub use nalgebra::{DMatrix, DVector};
