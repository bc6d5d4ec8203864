//! Exact solves of the reweighted ridge problem
//! `min Σ wᵢ(yᵢ - xᵢᵀβ)² + δ Σ γⱼβⱼ²`, in primal (p × p) or dual (n × n) form.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::kernels;
use crate::regress::weights::WeightState;

fn check(data: &Dataset, weights: &WeightState, delta: f64) -> Result<()> {
    if weights.w.len() != data.n() || weights.gamma.len() != data.p() {
        return Err(Error::Dimension(format!(
            "weights are {}+{} for a {}x{} dataset",
            weights.w.len(),
            weights.gamma.len(),
            data.n(),
            data.p()
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidInput(format!("delta must be >= 0, got {delta}")));
    }
    Ok(())
}

fn cholesky_solve(a: DMatrix<f64>, b: DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let chol = Cholesky::new(a).ok_or_else(|| Error::Numerical(format!("{what} matrix is not positive definite")))?;
    let sol = chol.solve(&b);
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("{what} solve produced non-finite values")));
    }
    Ok(sol)
}

/// `(XᵀWX + δΓ)⁻¹ XᵀWy` by Cholesky. Cost `O(p²n + p³)`.
pub fn ridge_solve_primal(data: &Dataset, weights: &WeightState, delta: f64) -> Result<DVector<f64>> {
    check(data, weights, delta)?;
    let mut xw = data.x().clone();
    for (mut row, w) in xw.row_iter_mut().zip(weights.w.iter()) {
        row *= w.sqrt();
    }
    let mut a = xw.tr_mul(&xw);
    for (j, g) in weights.gamma.iter().enumerate() {
        a[(j, j)] += delta * g;
    }
    let wy = data.y().component_mul(&weights.w);
    let b = kernels::matvec_t(data.x(), wy.as_slice());
    cholesky_solve(a, b, "primal ridge")
}

/// `Γ⁻¹Xᵀ(XΓ⁻¹Xᵀ + δW⁻¹)⁻¹ y`, the same solution through the matrix
/// inversion lemma. Cost `O(n²p + n³)`.
pub fn ridge_solve_dual(data: &Dataset, weights: &WeightState, delta: f64) -> Result<DVector<f64>> {
    check(data, weights, delta)?;
    let mut xg = data.x().clone();
    for (mut col, g) in xg.column_iter_mut().zip(weights.gamma.iter()) {
        col /= g.sqrt();
    }
    let mut k = &xg * xg.transpose();
    for (i, w) in weights.w.iter().enumerate() {
        k[(i, i)] += delta / w;
    }
    let alpha = cholesky_solve(k, data.y().clone(), "dual ridge")?;
    let mut beta = kernels::matvec_t(data.x(), alpha.as_slice());
    beta.component_div_assign(&weights.gamma);
    Ok(beta)
}

/// Primal form when `p ≤ n`, dual otherwise.
pub fn ridge_solve(data: &Dataset, weights: &WeightState, delta: f64) -> Result<DVector<f64>> {
    if data.p() <= data.n() {
        ridge_solve_primal(data, weights, delta)
    } else {
        ridge_solve_dual(data, weights, delta)
    }
}
