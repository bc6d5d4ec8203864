//! The logistic margin loss `h(z) = log(1 + e^{-z})` and its derivative.

/// `log(1 + exp(-z))` without overflow for large `|z|`.
pub fn logistic(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `h'(z) = -1 / (1 + e^{z})`, always in `[-1, 0]`.
pub fn logistic_deriv(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        -e / (1.0 + e)
    } else {
        -1.0 / (1.0 + z.exp())
    }
}
