//! Where a command's dataset comes from: a CSV file or a synthetic spec
//! string such as `family=sparse,n=200,p=50,s=5,seed=1`.

use advtrain::data::{generate, ill_conditioned_classification, load_csv, Family, SynthSpec, TargetColumn};
use advtrain::{DVector, Dataset, Task};
use serde::{Deserialize, Serialize};

use crate::args::SourceArgs;
use crate::error::{CliError, CliResult};

/// Name of the ill-conditioned classification preset in spec strings.
pub const ILL_CONDITIONED: &str = "ill-conditioned";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Csv { path: String, target: String, header: bool },
    Synth { spec: String },
}

impl SourceArgs {
    pub fn source(&self) -> Source {
        match (&self.data, &self.synth) {
            (Some(path), _) => Source::Csv { path: path.display().to_string(), target: self.target.clone(), header: !self.no_header },
            (None, Some(spec)) => Source::Synth { spec: spec.clone() },
            (None, None) => unreachable!("clap requires a data source"),
        }
    }
}

impl Source {
    pub fn load(&self, task: Task) -> CliResult<Dataset> {
        match self {
            Source::Csv { path, target, header } => {
                let target: TargetColumn = target.parse()?;
                Ok(load_csv(path, *header, &target, task)?)
            }
            Source::Synth { spec } => Ok(synthesize(spec, task, None)?.0),
        }
    }

    /// Same source with the synthetic seed replaced; files are unaffected.
    pub fn with_seed(&self, seed: u64) -> Source {
        match self {
            Source::Synth { spec } => Source::Synth { spec: format!("{spec},seed={seed}") },
            other => other.clone(),
        }
    }
}

/// Builds the dataset described by `spec`, returning the true coefficients
/// when the generator has them. `seed` overrides any seed in the string.
pub fn synthesize(spec: &str, task: Task, seed: Option<u64>) -> CliResult<(Dataset, Option<DVector<f64>>)> {
    let mut fields = spec.split(',').map(str::trim).filter(|f| !f.is_empty()).peekable();
    if fields.peek() == Some(&ILL_CONDITIONED) {
        fields.next();
        let mut s = seed;
        for f in fields {
            match f.split_once('=') {
                Some(("seed", v)) if seed.is_none() => s = Some(parse_num(f, v)?),
                Some(("seed", _)) => {}
                _ => return Err(CliError::Usage(format!("`{f}` is not an option of the {ILL_CONDITIONED} preset"))),
            }
        }
        if task != Task::BinaryClassification {
            return Err(CliError::Usage(format!("the {ILL_CONDITIONED} preset is a classification dataset")));
        }
        return Ok((ill_conditioned_classification(s.unwrap_or(0))?, None));
    }
    let mut parsed = parse_synth(fields, task)?;
    if let Some(s) = seed {
        parsed.seed = s;
    }
    let (data, beta) = generate(&parsed)?;
    Ok((data, Some(beta)))
}

fn parse_num<T: std::str::FromStr>(field: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| CliError::Usage(format!("cannot parse `{field}` in synthetic spec")))
}

fn parse_synth<'a>(fields: impl Iterator<Item = &'a str>, task: Task) -> CliResult<SynthSpec> {
    let mut family = Family::Isotropic;
    let (mut n, mut p) = (None, None);
    let mut rest = Vec::new();
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value in synthetic spec, got `{f}`")))?;
        match k {
            "family" => family = v.parse()?,
            "n" => n = Some(parse_num(f, v)?),
            "p" => p = Some(parse_num(f, v)?),
            _ => rest.push((f, k, v)),
        }
    }
    let (n, p) = match (n, p) {
        (Some(n), Some(p)) => (n, p),
        _ => return Err(CliError::Usage("synthetic spec needs n and p".into())),
    };
    let mut spec = SynthSpec { task, ..SynthSpec::new(family, n, p) };
    for (f, k, v) in rest {
        match k {
            "noise" => spec.noise_sd = parse_num(f, v)?,
            "d" | "latent" => spec.latent_dim = parse_num(f, v)?,
            "s" | "sparsity" => spec.sparsity = parse_num(f, v)?,
            "scale" => spec.feature_scale = parse_num(f, v)?,
            "seed" => spec.seed = parse_num(f, v)?,
            _ => return Err(CliError::Usage(format!("unknown synthetic spec key `{k}`"))),
        }
    }
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_defaults() {
        let (d, beta) = synthesize("family=sparse,n=30,p=8,s=2,noise=0.5,seed=4", Task::Regression, None).unwrap();
        assert_eq!((d.n(), d.p()), (30, 8));
        let beta = beta.unwrap();
        assert_eq!(beta.iter().filter(|b| **b != 0.0).count(), 2);
        let (again, _) = synthesize("n=30,p=8,s=2,noise=0.5,seed=4,family=sparse", Task::Regression, None).unwrap();
        assert_eq!(d.x(), again.x());
    }

    #[test]
    fn seed_override_wins() {
        let (a, _) = synthesize("n=10,p=3,seed=1", Task::Regression, Some(9)).unwrap();
        let (b, _) = synthesize("n=10,p=3,seed=9", Task::Regression, None).unwrap();
        assert_eq!(a.x(), b.x());
        let s = Source::Synth { spec: "n=10,p=3,seed=1".into() }.with_seed(9);
        assert_eq!(s.load(Task::Regression).unwrap().x(), b.x());
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["n=10", "n=10,p=x", "n=10,p=3,colour=red", "n=10,p=3,family=dense", "n=0,p=3", "p"] {
            assert!(matches!(synthesize(bad, Task::Regression, None), Err(CliError::Usage(_))), "{bad}");
        }
        assert!(synthesize(ILL_CONDITIONED, Task::Regression, None).is_err());
    }

    #[test]
    fn preset_shape() {
        let (d, beta) = synthesize("ill-conditioned,seed=2", Task::BinaryClassification, None).unwrap();
        assert_eq!((d.n(), d.p()), (200, 50));
        assert!(beta.is_none());
    }
}
