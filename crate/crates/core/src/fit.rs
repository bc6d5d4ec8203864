use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Options shared by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Iterations for deterministic solvers, epochs for stochastic ones.
    pub max_iter: usize,
    /// Stop once `|f_k - f_{k-1}| <= tol * (1 + |f_k|)`.
    pub tol: f64,
    pub seed: u64,
    /// Overrides the automatic step size (initial step for line searches).
    pub step_size: Option<f64>,
    pub record_trace: bool,
    /// Power iterations used to estimate the largest eigenvalue of `XᵀX/n`.
    pub power_iters: usize,
    /// Smoothing of the reweighting in the regression solvers.
    pub eps: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-8,
            seed: 0,
            step_size: None,
            record_trace: true,
            power_iters: 10,
            eps: 1e-20,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(s) = self.step_size {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidInput(format!("step size must be positive, got {s}")));
            }
        }
        if self.power_iters == 0 {
            return Err(Error::InvalidInput("power_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn stalled(&self, prev: f64, cur: f64) -> bool {
        (cur - prev).abs() <= self.tol * (1.0 + cur.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iter: usize,
    pub objective: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub beta: DVector<f64>,
    /// Final objective of the solved problem, in the non-smooth β-space form.
    pub objective: f64,
    pub trace: Vec<TracePoint>,
    pub iterations: usize,
    pub converged: bool,
    pub solver: String,
    /// Derived solver settings (step sizes, ρ, schedules) for reproducibility.
    pub config: BTreeMap<String, f64>,
}

pub(crate) struct Recorder {
    start: Instant,
    enabled: bool,
    points: Vec<TracePoint>,
}

impl Recorder {
    pub(crate) fn new(enabled: bool) -> Self {
        Self { start: Instant::now(), enabled, points: Vec::new() }
    }

    pub(crate) fn push(&mut self, iter: usize, objective: f64) -> Result<()> {
        if !objective.is_finite() {
            return Err(Error::Numerical(format!("objective is not finite at iteration {iter}")));
        }
        if self.enabled {
            self.points.push(TracePoint { iter, objective, seconds: self.start.elapsed().as_secs_f64() });
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> Vec<TracePoint> {
        self.points
    }
}
