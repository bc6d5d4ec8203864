//! Largest eigenvalue of the empirical second-moment matrix `(1/n) XᵀX`.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernels;
use crate::rng;

/// Power iteration for `λ_max((1/n) Σ xᵢxᵢᵀ)`, applied through products with
/// `X` and `Xᵀ` only. The start vector is drawn from `seed`.
pub fn empirical_second_moment_lambda_max(x: &DMatrix<f64>, iters: usize, seed: u64) -> Result<f64> {
    let (n, p) = x.shape();
    if n == 0 || p == 0 {
        return Err(Error::InvalidInput("power method on an empty matrix".into()));
    }
    if iters == 0 {
        return Err(Error::InvalidInput("power method needs at least one iteration".into()));
    }
    let mut rng = rng::stream(seed, 0x5eed);
    let mut v = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
    let norm = v.norm();
    v /= norm;

    let mut estimate = 0.0;
    for _ in 0..iters {
        let xv = kernels::matvec(x, v.as_slice());
        let mut w = kernels::matvec_t(x, xv.as_slice());
        w /= n as f64;
        // Rayleigh quotient vᵀ M v with ‖v‖ = 1.
        estimate = v.dot(&w);
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(0.0);
        }
        v = w / wn;
    }
    Ok(estimate.max(0.0))
}
