use std::fmt;
use std::str::FromStr;

use crate::attack::AttackSpec;
use crate::classify::{self, ConeSpec};
use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::fit::{FitResult, SolveOptions};
use crate::norm::NormKind;
use crate::regress;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Irrr,
    Icg,
    Gd,
    GdLs,
    Agd,
    Sgd,
    Saga,
    FgsmGd,
    FgsmSgd,
}

impl Solver {
    pub const ALL: [Solver; 9] = [
        Solver::Irrr,
        Solver::Icg,
        Solver::Gd,
        Solver::GdLs,
        Solver::Agd,
        Solver::Sgd,
        Solver::Saga,
        Solver::FgsmGd,
        Solver::FgsmSgd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Irrr => "irrr",
            Solver::Icg => "icg",
            Solver::Gd => "gd",
            Solver::GdLs => "gd-ls",
            Solver::Agd => "agd",
            Solver::Sgd => "sgd",
            Solver::Saga => "saga",
            Solver::FgsmGd => "fgsm-gd",
            Solver::FgsmSgd => "fgsm-sgd",
        }
    }

    pub fn task(self) -> Task {
        match self {
            Solver::Irrr | Solver::Icg => Task::Regression,
            _ => Task::BinaryClassification,
        }
    }

    /// Whether `max_iter` counts epochs rather than iterations.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Solver::Sgd | Solver::Saga | Solver::FgsmSgd)
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown solver `{s}`")))
    }
}

/// Fits an adversarially trained linear model with the chosen solver. For
/// classification the cone scale ρ is picked by [`classify::choose_rho`].
pub fn fit(data: &Dataset, norm: NormKind, delta: f64, solver: Solver, opts: &SolveOptions) -> Result<FitResult> {
    data.require(solver.task(), solver.name())?;
    let cone = || -> Result<ConeSpec> { ConeSpec::new(norm, delta, classify::choose_rho(data)?) };
    match solver {
        Solver::Irrr => regress::solve_irrr(data, delta, norm, opts),
        Solver::Icg => regress::solve_icg(data, delta, norm, opts, regress::DEFAULT_INNER_ITER),
        Solver::Gd => classify::solve_pgd(data, &cone()?, opts),
        Solver::GdLs => classify::solve_pgd_linesearch(data, &cone()?, opts),
        Solver::Agd => classify::solve_apgd(data, &cone()?, opts),
        Solver::Sgd => classify::solve_sgd(data, &cone()?, opts),
        Solver::Saga => classify::solve_saga(data, &cone()?, opts),
        Solver::FgsmGd => classify::solve_fgsm_baseline(data, AttackSpec::new(norm, delta)?, opts, false),
        Solver::FgsmSgd => classify::solve_fgsm_baseline(data, AttackSpec::new(norm, delta)?, opts, true),
    }
}
