//! Projected first-order solvers over the extended variable `(β, t)`, and the
//! FGSM sub-gradient baseline that works on `β` directly.
//!
//! Every solver reports the β-space worst-case risk so that runs of different
//! solvers can be compared. Deterministic solvers trace the best value seen so
//! far and return the corresponding `β`; stochastic solvers trace once per
//! epoch.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::Rng;

use crate::attack::AttackSpec;
use crate::classify::cone::{project_in_place, ConeSpec, ExtendedPoint};
use crate::classify::risk::margins;
use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::fit::{FitResult, Recorder, SolveOptions};
use crate::kernels;
use crate::loss::{logistic, logistic_deriv};
use crate::norm::{dual_norm, NormKind};
use crate::rng;
use crate::spectral::empirical_second_moment_lambda_max;

/// Smallest step a line search may reach before giving up.
pub const MIN_STEP: f64 = 1e-18;

/// Initial line-search step, as a multiple of `1/L`. The bound `L` is loose
/// (it uses the trace of the second-moment matrix), so searches start well above it.
pub const LINE_SEARCH_STEP_FACTOR: f64 = 1024.0;

struct Problem<'a> {
    data: &'a Dataset,
    cone: ConeSpec,
    spec: AttackSpec,
    lambda_max: f64,
    lipschitz: f64,
}

impl<'a> Problem<'a> {
    fn new(data: &'a Dataset, cone: ConeSpec, opts: &SolveOptions, solver: &str) -> Result<Self> {
        data.require(Task::BinaryClassification, solver)?;
        opts.validate()?;
        let lambda_max = empirical_second_moment_lambda_max(data.x(), opts.power_iters, opts.seed)?;
        let lipschitz = 0.5 * lambda_max.max(cone.rho * cone.rho);
        Ok(Self { data, cone, spec: AttackSpec { norm: cone.norm, delta: cone.delta }, lambda_max, lipschitz })
    }

    fn start(&self) -> ExtendedPoint {
        let beta = DVector::zeros(self.data.p());
        let t = self.cone.tight_t(beta.as_slice()) + 1e-12;
        ExtendedPoint::new(beta, t)
    }

    /// Smooth risk, its gradient and the β-space objective from one pass.
    fn eval(&self, w: &ExtendedPoint) -> (f64, ExtendedPoint, f64) {
        let data = self.data;
        let n = data.n() as f64;
        let mut z = margins(data, &w.beta);
        let shift = self.cone.rho * w.t;
        let adv_shift = self.spec.delta * dual_norm(w.beta.as_slice(), self.spec.norm);
        let (mut value, mut objective, mut dsum) = (0.0, 0.0, 0.0);
        for (zi, yi) in z.iter_mut().zip(data.y().iter()) {
            value += logistic(*zi - shift);
            objective += logistic(*zi - adv_shift);
            let d = logistic_deriv(*zi - shift);
            dsum += d;
            *zi = d * yi;
        }
        let mut gbeta = kernels::matvec_t(data.x(), z.as_slice());
        gbeta /= n;
        (value / n, ExtendedPoint::new(gbeta, -self.cone.rho * dsum / n), objective / n)
    }

    fn objective(&self, beta: &DVector<f64>) -> f64 {
        crate::classify::risk::adversarial_risk(beta, self.data, self.spec)
    }

    fn config(&self, step: f64) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("delta".to_string(), self.cone.delta),
            ("rho".to_string(), self.cone.rho),
            ("lambda_max".to_string(), self.lambda_max),
            ("lipschitz".to_string(), self.lipschitz),
            ("step_size".to_string(), step),
        ])
    }
}

struct Best {
    beta: DVector<f64>,
    objective: f64,
}

impl Best {
    fn offer(&mut self, beta: &DVector<f64>, objective: f64) {
        if objective < self.objective {
            self.objective = objective;
            self.beta.copy_from(beta);
        }
    }
}

fn projected_step(w: &ExtendedPoint, g: &ExtendedPoint, step: f64, cone: &ConeSpec, scratch: &mut Vec<f64>) -> ExtendedPoint {
    let mut next = w.clone();
    next.axpy(-step, g);
    project_in_place(&mut next, cone, scratch);
    next
}

/// Sufficient-decrease test of the backtracking line search.
fn accepts(f_next: f64, f_base: f64, g: &ExtendedPoint, d: &ExtendedPoint, step: f64) -> bool {
    let model = f_base + d.dot(g) + d.norm_squared() / (2.0 * step);
    // tolerate rounding once the iterates have converged
    f_next <= model + 1e-15 * (1.0 + f_base.abs())
}

/// Projected gradient descent with fixed step `1/L` (or `opts.step_size`).
pub fn solve_pgd(data: &Dataset, cone: &ConeSpec, opts: &SolveOptions) -> Result<FitResult> {
    let prob = Problem::new(data, *cone, opts, "gd")?;
    let step = opts.step_size.unwrap_or(1.0 / prob.lipschitz);
    let mut rec = Recorder::new(opts.record_trace);
    let mut scratch = Vec::new();

    let mut w = prob.start();
    let (mut f, mut g, obj) = prob.eval(&w);
    let mut best = Best { beta: w.beta.clone(), objective: obj };
    rec.push(0, best.objective)?;
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=opts.max_iter {
        iterations = k;
        w = projected_step(&w, &g, step, cone, &mut scratch);
        let (f_next, g_next, obj) = prob.eval(&w);
        best.offer(&w.beta, obj);
        rec.push(k, best.objective)?;
        let stalled = opts.stalled(f, f_next);
        f = f_next;
        g = g_next;
        if stalled {
            converged = true;
            break;
        }
    }
    let mut config = prob.config(step);
    config.insert("gradient_evals".into(), iterations as f64 + 1.0);
    config.insert("final_t".into(), w.t);
    Ok(FitResult {
        beta: best.beta,
        objective: best.objective,
        trace: rec.finish(),
        iterations,
        converged,
        solver: "gd".into(),
        config,
    })
}

/// Projected gradient descent with backtracking line search. The step is
/// halved until the quadratic upper model holds and is carried over to the
/// next iteration.
pub fn solve_pgd_linesearch(data: &Dataset, cone: &ConeSpec, opts: &SolveOptions) -> Result<FitResult> {
    let prob = Problem::new(data, *cone, opts, "gd-ls")?;
    let initial = opts.step_size.unwrap_or(LINE_SEARCH_STEP_FACTOR / prob.lipschitz);
    let mut step = initial;
    let mut rec = Recorder::new(opts.record_trace);
    let mut scratch = Vec::new();

    let mut w = prob.start();
    let (mut f, mut g, obj) = prob.eval(&w);
    let mut best = Best { beta: w.beta.clone(), objective: obj };
    rec.push(0, best.objective)?;
    let mut converged = false;
    let mut iterations = 0;
    let mut evals = 1usize;
    for k in 1..=opts.max_iter {
        iterations = k;
        let (next, f_next, g_next, obj) = loop {
            let next = projected_step(&w, &g, step, cone, &mut scratch);
            let (f_next, g_next, obj) = prob.eval(&next);
            evals += 1;
            if accepts(f_next, f, &g, &next.diff(&w), step) {
                break (next, f_next, g_next, obj);
            }
            step /= 2.0;
            if step < MIN_STEP {
                return Err(Error::Numerical(format!("line search step underflow at iteration {k}")));
            }
        };
        w = next;
        best.offer(&w.beta, obj);
        rec.push(k, best.objective)?;
        let stalled = opts.stalled(f, f_next);
        f = f_next;
        g = g_next;
        if stalled {
            converged = true;
            break;
        }
    }
    let mut config = prob.config(step);
    config.insert("initial_step".into(), initial);
    config.insert("gradient_evals".into(), evals as f64);
    Ok(FitResult {
        beta: best.beta,
        objective: best.objective,
        trace: rec.finish(),
        iterations,
        converged,
        solver: "gd-ls".into(),
        config,
    })
}

/// Accelerated projected gradient (FISTA momentum) with backtracking from the
/// extrapolated point.
pub fn solve_apgd(data: &Dataset, cone: &ConeSpec, opts: &SolveOptions) -> Result<FitResult> {
    let prob = Problem::new(data, *cone, opts, "agd")?;
    let initial = opts.step_size.unwrap_or(LINE_SEARCH_STEP_FACTOR / prob.lipschitz);
    let mut step = initial;
    let mut rec = Recorder::new(opts.record_trace);
    let mut scratch = Vec::new();

    let mut w = prob.start();
    let mut w_prev = w.clone();
    let (mut f, _, obj) = prob.eval(&w);
    let mut best = Best { beta: w.beta.clone(), objective: obj };
    rec.push(0, best.objective)?;
    let mut alpha = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    let mut evals = 1usize;
    for k in 1..=opts.max_iter {
        iterations = k;
        let alpha_next = (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt()) / 2.0;
        let momentum = (alpha - 1.0) / alpha_next;
        let mut z = w.clone();
        z.axpy(momentum, &w.diff(&w_prev));
        let (fz, gz, _) = prob.eval(&z);
        evals += 1;
        let (next, f_next, obj) = loop {
            let next = projected_step(&z, &gz, step, cone, &mut scratch);
            let (f_next, _, obj) = prob.eval(&next);
            if accepts(f_next, fz, &gz, &next.diff(&z), step) {
                break (next, f_next, obj);
            }
            step /= 2.0;
            if step < MIN_STEP {
                return Err(Error::Numerical(format!("line search step underflow at iteration {k}")));
            }
        };
        w_prev = std::mem::replace(&mut w, next);
        alpha = alpha_next;
        best.offer(&w.beta, obj);
        rec.push(k, best.objective)?;
        let stalled = opts.stalled(f, f_next);
        f = f_next;
        if stalled {
            converged = true;
            break;
        }
    }
    let mut config = prob.config(step);
    config.insert("initial_step".into(), initial);
    config.insert("gradient_evals".into(), evals as f64);
    Ok(FitResult {
        beta: best.beta,
        objective: best.objective,
        trace: rec.finish(),
        iterations,
        converged,
        solver: "agd".into(),
        config,
    })
}

/// Decaying schedule `γ₀ / sqrt(1 + k/n)` used by the stochastic solvers.
pub fn sgd_step(step0: f64, k: usize, n: usize) -> f64 {
    step0 / (1.0 + k as f64 / n as f64).sqrt()
}

/// `h'(zᵢ)` for one sample, with `zᵢ = yᵢxᵢᵀβ - ρt`.
fn sample_deriv(data: &Dataset, i: usize, w: &ExtendedPoint, rho: f64) -> f64 {
    let xi = data.row(i);
    let m: f64 = xi.iter().zip(w.beta.iter()).map(|(a, b)| a * b).sum();
    logistic_deriv(data.y()[i] * m - rho * w.t)
}

/// `w -= scale · (yᵢxᵢ, -ρ)`
fn sample_axpy(w: &mut ExtendedPoint, data: &Dataset, i: usize, rho: f64, scale: f64) {
    let yi = data.y()[i];
    for (b, &x) in w.beta.iter_mut().zip(data.row(i)) {
        *b -= scale * yi * x;
    }
    w.t += scale * rho;
}

/// Projected SGD, one uniformly drawn sample per step and `n` steps per epoch.
pub fn solve_sgd(data: &Dataset, cone: &ConeSpec, opts: &SolveOptions) -> Result<FitResult> {
    let prob = Problem::new(data, *cone, opts, "sgd")?;
    let step0 = opts.step_size.unwrap_or(1.0 / prob.lipschitz);
    let n = data.n();
    let mut rng = rng::stream(opts.seed, 1);
    let mut rec = Recorder::new(opts.record_trace);
    let mut scratch = Vec::new();

    let mut w = prob.start();
    let mut f = prob.objective(&w.beta);
    rec.push(0, f)?;
    let mut converged = false;
    let mut epochs = 0;
    let mut k = 0usize;
    for epoch in 1..=opts.max_iter {
        epochs = epoch;
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let d = sample_deriv(data, i, &w, cone.rho);
            sample_axpy(&mut w, data, i, cone.rho, sgd_step(step0, k, n) * d);
            project_in_place(&mut w, cone, &mut scratch);
            k += 1;
        }
        let f_next = prob.objective(&w.beta);
        rec.push(epoch, f_next)?;
        let stalled = opts.stalled(f, f_next);
        f = f_next;
        if stalled {
            converged = true;
            break;
        }
    }
    let mut config = prob.config(step0);
    config.insert("schedule_inv_sqrt_epoch".into(), 1.0);
    Ok(FitResult { beta: w.beta, objective: f, trace: rec.finish(), iterations: epochs, converged, solver: "sgd".into(), config })
}

/// Table of per-sample loss derivatives kept by SAGA, and the running mean of
/// the gradients they represent (`∇fᵢ = h'ᵢ · (yᵢxᵢ, -ρ)`).
#[derive(Debug, Clone)]
pub struct SagaState {
    pub gradient_table: Vec<f64>,
    pub running_mean: ExtendedPoint,
}

impl SagaState {
    /// Fills the table with one full pass at `w`.
    pub fn new(data: &Dataset, cone: &ConeSpec, w: &ExtendedPoint) -> Self {
        let table: Vec<f64> = (0..data.n()).map(|i| sample_deriv(data, i, w, cone.rho)).collect();
        let running_mean = Self::mean_of(data, cone, &table);
        Self { gradient_table: table, running_mean }
    }

    fn mean_of(data: &Dataset, cone: &ConeSpec, table: &[f64]) -> ExtendedPoint {
        let n = data.n() as f64;
        let weighted: Vec<f64> = table.iter().zip(data.y().iter()).map(|(d, y)| d * y).collect();
        let mut beta = kernels::matvec_t(data.x(), &weighted);
        beta /= n;
        ExtendedPoint::new(beta, -cone.rho * table.iter().sum::<f64>() / n)
    }

    /// Relative gap between the running mean and the mean recomputed from the
    /// table.
    pub fn mean_residual(&self, data: &Dataset, cone: &ConeSpec) -> f64 {
        let exact = Self::mean_of(data, cone, &self.gradient_table);
        exact.diff(&self.running_mean).norm_squared().sqrt() / exact.norm_squared().sqrt().max(f64::MIN_POSITIVE)
    }
}

/// Projected SAGA with fixed step `1/(3L)`.
pub fn solve_saga(data: &Dataset, cone: &ConeSpec, opts: &SolveOptions) -> Result<FitResult> {
    solve_saga_inspect(data, cone, opts, &mut |_, _| {})
}

/// [`solve_saga`] with a callback invoked after every epoch.
pub fn solve_saga_inspect(
    data: &Dataset,
    cone: &ConeSpec,
    opts: &SolveOptions,
    on_epoch: &mut dyn FnMut(usize, &SagaState),
) -> Result<FitResult> {
    let prob = Problem::new(data, *cone, opts, "saga")?;
    let step = opts.step_size.unwrap_or(1.0 / (3.0 * prob.lipschitz));
    let n = data.n();
    let inv_n = 1.0 / n as f64;
    let mut rng = rng::stream(opts.seed, 1);
    let mut rec = Recorder::new(opts.record_trace);
    let mut scratch = Vec::new();

    let mut w = prob.start();
    let mut state = SagaState::new(data, cone, &w);
    let mut f = prob.objective(&w.beta);
    rec.push(0, f)?;
    let mut converged = false;
    let mut epochs = 0;
    for epoch in 1..=opts.max_iter {
        epochs = epoch;
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let fresh = sample_deriv(data, i, &w, cone.rho);
            let change = fresh - state.gradient_table[i];
            state.gradient_table[i] = fresh;
            // g = ∇fᵢ(w) - v_old + ḡ
            sample_axpy(&mut w, data, i, cone.rho, step * change);
            w.axpy(-step, &state.running_mean);
            project_in_place(&mut w, cone, &mut scratch);
            // ḡ += (v_new - v_old) / n
            let mean = &mut state.running_mean;
            let yi = data.y()[i];
            for (b, &x) in mean.beta.iter_mut().zip(data.row(i)) {
                *b += change * inv_n * yi * x;
            }
            mean.t -= change * inv_n * cone.rho;
        }
        on_epoch(epoch, &state);
        let f_next = prob.objective(&w.beta);
        rec.push(epoch, f_next)?;
        let stalled = opts.stalled(f, f_next);
        f = f_next;
        if stalled {
            converged = true;
            break;
        }
    }
    Ok(FitResult { beta: w.beta, objective: f, trace: rec.finish(), iterations: epochs, converged, solver: "saga".into(), config: prob.config(step) })
}

/// Gradient of `(1/n) Σ h(yᵢxᵢᵀβ - δ‖β‖₁)` at points where no coordinate of β
/// is zero; elsewhere it is the sub-gradient with `sign(0) = 0`. Equals the
/// gradient of the clean loss evaluated at the FGSM-perturbed inputs
/// `xᵢ - δyᵢ sign(β)`.
pub fn fgsm_gradient(beta: &DVector<f64>, data: &Dataset, delta: f64) -> DVector<f64> {
    let n = data.n() as f64;
    let shift = delta * beta.iter().map(|b| b.abs()).sum::<f64>();
    let mut d = margins(data, beta);
    let mut dsum = 0.0;
    for (di, yi) in d.iter_mut().zip(data.y().iter()) {
        let h = logistic_deriv(*di - shift);
        dsum += h;
        *di = h * yi;
    }
    let mut g = kernels::matvec_t(data.x(), d.as_slice());
    for (gj, bj) in g.iter_mut().zip(beta.iter()) {
        *gj = (*gj - delta * dsum * sign0(*bj)) / n;
    }
    g
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Sub-gradient descent on the non-smooth ℓ∞ objective, recomputing the FGSM
/// attack at every step. `stochastic` draws one sample per step with the same
/// decaying schedule as [`solve_sgd`].
pub fn solve_fgsm_baseline(data: &Dataset, spec: AttackSpec, opts: &SolveOptions, stochastic: bool) -> Result<FitResult> {
    let name = if stochastic { "fgsm-sgd" } else { "fgsm-gd" };
    if spec.norm != NormKind::Linf {
        return Err(Error::InvalidInput("the FGSM baseline is defined for l-infinity attacks".into()));
    }
    // ρ only enters the step-size bound, so the same L as the other solvers is used
    let rho = crate::classify::risk::choose_rho(data)?;
    let cone = ConeSpec::new(spec.norm, spec.delta, rho)?;
    let prob = Problem::new(data, cone, opts, name)?;
    let step0 = opts.step_size.unwrap_or(1.0 / prob.lipschitz);
    let n = data.n();
    let mut rec = Recorder::new(opts.record_trace);

    let mut beta = DVector::zeros(data.p());
    let mut best = Best { beta: beta.clone(), objective: prob.objective(&beta) };
    rec.push(0, best.objective)?;
    let mut f = best.objective;
    let mut converged = false;
    let mut iterations = 0;
    let mut rng = rng::stream(opts.seed, 1);
    let mut k = 0usize;
    for it in 1..=opts.max_iter {
        iterations = it;
        if stochastic {
            for _ in 0..n {
                let i = rng.random_range(0..n);
                let xi = data.row(i);
                let yi = data.y()[i];
                let l1: f64 = beta.iter().map(|b: &f64| b.abs()).sum();
                let m: f64 = xi.iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
                let h = logistic_deriv(yi * m - spec.delta * l1);
                let step = sgd_step(step0, k, n);
                for (j, b) in beta.iter_mut().enumerate() {
                    let g = h * (yi * xi[j] - spec.delta * sign0(*b));
                    *b -= step * g;
                }
                k += 1;
            }
        } else {
            let g = fgsm_gradient(&beta, data, spec.delta);
            beta.axpy(-step0, &g, 1.0);
        }
        let obj = prob.objective(&beta);
        best.offer(&beta, obj);
        rec.push(it, best.objective)?;
        let stalled = opts.stalled(f, obj);
        f = obj;
        if stalled {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        beta: best.beta,
        objective: best.objective,
        trace: rec.finish(),
        iterations,
        converged,
        solver: name.into(),
        config: prob.config(step0),
    })
}
