use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A vector norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }

    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

/// The norm bounding the adversarial perturbation, `‖Δx‖ ≤ δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L2,
    Linf,
}

impl NormKind {
    pub fn primal(self) -> Norm {
        match self {
            NormKind::L2 => Norm::L2,
            NormKind::Linf => Norm::Linf,
        }
    }

    pub fn dual(self) -> Norm {
        self.primal().dual()
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L2 => f.write_str("l2"),
            NormKind::Linf => f.write_str("linf"),
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(NormKind::L2),
            "linf" | "inf" => Ok(NormKind::Linf),
            other => Err(Error::InvalidInput(format!("unknown norm `{other}` (expected l2 or linf)"))),
        }
    }
}

/// `‖v‖∗` for the dual of the perturbation norm: ℓ1 for ℓ∞ attacks, ℓ2 for ℓ2.
pub fn dual_norm(v: &[f64], kind: NormKind) -> f64 {
    kind.dual().of(v)
}

pub fn primal_norm(v: &[f64], kind: NormKind) -> f64 {
    kind.primal().of(v)
}
