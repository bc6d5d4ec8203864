use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Isotropic,
    SpikedCovariance,
    SparseVector,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Isotropic => "isotropic",
            Family::SpikedCovariance => "spiked",
            Family::SparseVector => "sparse",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isotropic" => Ok(Family::Isotropic),
            "spiked" => Ok(Family::SpikedCovariance),
            "sparse" => Ok(Family::SparseVector),
            _ => Err(Error::InvalidInput(format!("unknown family `{s}` (expected isotropic, spiked or sparse)"))),
        }
    }
}

/// Parameters of a synthetic linear model. For classification the labels
/// are the signs of the regression targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub family: Family,
    pub task: Task,
    pub n: usize,
    pub p: usize,
    pub noise_sd: f64,
    /// Latent dimension of the spiked model.
    pub latent_dim: usize,
    /// Support size of the sparse model.
    pub sparsity: usize,
    /// Standard deviation of the features (isotropic and sparse models).
    pub feature_scale: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(family: Family, n: usize, p: usize) -> Self {
        Self {
            family,
            task: Task::Regression,
            n,
            p,
            noise_sd: 0.1,
            latent_dim: 1.max(p / 10),
            sparsity: 1.max(p / 10),
            feature_scale: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n == 0 || self.p == 0 {
            return bad(format!("n and p must be positive, got {}x{}", self.n, self.p));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return bad(format!("noise_sd must be finite and >= 0, got {}", self.noise_sd));
        }
        if !(self.feature_scale > 0.0 && self.feature_scale.is_finite()) {
            return bad(format!("feature_scale must be positive, got {}", self.feature_scale));
        }
        match self.family {
            Family::SpikedCovariance if self.latent_dim == 0 || self.latent_dim > self.p => {
                bad(format!("latent_dim must lie in 1..={}, got {}", self.p, self.latent_dim))
            }
            Family::SparseVector if self.sparsity == 0 || self.sparsity > self.p => {
                bad(format!("sparsity must lie in 1..={}, got {}", self.p, self.sparsity))
            }
            _ => Ok(()),
        }
    }
}

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize, sd: f64) -> DMatrix<f64> {
    // filled row by row so that draws do not depend on storage order
    DMatrix::from_row_iterator(rows, cols, (0..rows * cols).map(|_| sd * rng.sample::<f64, _>(StandardNormal)))
}

fn gaussian_vec(rng: &mut impl Rng, len: usize, sd: f64) -> DVector<f64> {
    DVector::from_iterator(len, (0..len).map(|_| sd * rng.sample::<f64, _>(StandardNormal)))
}

fn finish(x: DMatrix<f64>, signal: DVector<f64>, spec: &SynthSpec, rng: &mut impl Rng) -> Result<Dataset> {
    let noise = gaussian_vec(rng, spec.n, spec.noise_sd);
    let mut y = signal + noise;
    if spec.task == Task::BinaryClassification {
        y.apply(|v| *v = if *v >= 0.0 { 1.0 } else { -1.0 });
    }
    Dataset::new(x, y, spec.task)
}

/// Orthonormal columns from a Gaussian matrix, scaled so that `WᵀW = (p/d) I`.
fn spiked_loadings(rng: &mut impl Rng, p: usize, d: usize) -> DMatrix<f64> {
    let g = gaussian(rng, p, d, 1.0);
    g.qr().q() * (p as f64 / d as f64).sqrt()
}

/// Draws a dataset and the coefficient vector that generated it. For the
/// spiked model the returned vector is the population least-squares
/// predictor `W(WᵀW)⁻¹θ`, given for reference only.
pub fn generate(spec: &SynthSpec) -> Result<(Dataset, DVector<f64>)> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = stream(spec.seed, 0);
    match spec.family {
        Family::Isotropic | Family::SparseVector => {
            let beta = if spec.family == Family::Isotropic {
                gaussian_vec(&mut rng, p, 1.0 / (p as f64).sqrt())
            } else {
                let s = spec.sparsity;
                let mut beta = DVector::zeros(p);
                let support = sample(&mut rng, p, s);
                for j in support.iter() {
                    beta[j] = rng.sample::<f64, _>(StandardNormal) / (s as f64).sqrt();
                }
                beta
            };
            let x = gaussian(&mut rng, n, p, spec.feature_scale);
            let signal = &x * &beta;
            Ok((finish(x, signal, spec, &mut rng)?, beta))
        }
        Family::SpikedCovariance => {
            let d = spec.latent_dim;
            let w = spiked_loadings(&mut rng, p, d);
            let theta = gaussian_vec(&mut rng, d, 1.0 / (d as f64).sqrt());
            let z = gaussian(&mut rng, n, d, 1.0);
            let u = gaussian(&mut rng, n, p, 1.0);
            let x = &z * w.transpose() + u;
            let signal = &z * &theta;
            let beta = &w * &theta * (d as f64 / p as f64);
            Ok((finish(x, signal, spec, &mut rng)?, beta))
        }
    }
}

/// ℓ∞ radius used with [`ill_conditioned_classification`] in the convergence
/// benchmarks.
pub const ILL_CONDITIONED_DELTA: f64 = 20.0;

/// Fixed classification instance whose feature standard deviations are
/// log-spaced over three decades: `n = 200`, `p = 50`, labels are the signs of
/// a linear score plus noise of the same spread.
pub fn ill_conditioned_classification(seed: u64) -> Result<Dataset> {
    let (n, p) = (200, 50);
    let mut rng = stream(seed, 0);
    let scales: Vec<f64> = (0..p).map(|j| 10f64.powf(3.0 * j as f64 / (p - 1) as f64)).collect();
    let mut x = gaussian(&mut rng, n, p, 1.0);
    for (mut col, s) in x.column_iter_mut().zip(&scales) {
        col *= *s;
    }
    let beta = DVector::from_iterator(p, scales.iter().map(|s| rng.sample::<f64, _>(StandardNormal) / s));
    let mut y = &x * &beta;
    let sd = y.norm() / (n as f64).sqrt();
    for v in y.iter_mut() {
        let noisy = *v + sd * rng.sample::<f64, _>(StandardNormal);
        *v = if noisy >= 0.0 { 1.0 } else { -1.0 };
    }
    Dataset::new(x, y, Task::BinaryClassification)
}
