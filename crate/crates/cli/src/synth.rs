use advtrain::attack::{default_delta, zero_solution_threshold};
use advtrain::data::{generate, standardize, write_csv, Family, SynthSpec};
use advtrain::Task;
use serde_json::{json, Value};

use crate::args::{DeltaArgs, SynthArgs};
use crate::error::CliResult;
use crate::output::write_json;

/// Writes `data.csv` and `truth.json` (true coefficients and generator settings).
pub fn cmd_synth(a: &SynthArgs) -> CliResult<Value> {
    let family: Family = a.family.parse()?;
    let mut spec = SynthSpec { task: a.task.into(), seed: a.seed, ..SynthSpec::new(family, a.n, a.p) };
    if let Some(v) = a.noise {
        spec.noise_sd = v;
    }
    if let Some(v) = a.latent_dim {
        spec.latent_dim = v;
    }
    if let Some(v) = a.sparsity {
        spec.sparsity = v;
    }
    if let Some(v) = a.scale {
        spec.feature_scale = v;
    }
    let (data, beta) = generate(&spec)?;
    std::fs::create_dir_all(&a.out)?;
    write_csv(a.out.join("data.csv"), &data)?;
    let truth = json!({
        "true_beta": beta.as_slice(),
        "spec": {
            "family": spec.family.to_string(),
            "task": spec.task.to_string(),
            "n": spec.n,
            "p": spec.p,
            "noise_sd": spec.noise_sd,
            "latent_dim": spec.latent_dim,
            "sparsity": spec.sparsity,
            "feature_scale": spec.feature_scale,
            "seed": spec.seed,
        },
    });
    write_json(&a.out.join("truth.json"), &truth)?;
    Ok(truth)
}

/// Default radius of the (standardized) design matrix, with the
/// zero-solution threshold for regression targets.
pub fn cmd_delta(a: &DeltaArgs) -> CliResult<Value> {
    let task: Task = a.task.into();
    let mut data = a.source.source().load(task)?;
    if !a.no_standardize {
        data = standardize(&data)?.0;
    }
    let delta = default_delta(data.x(), a.norm, a.mc_samples, a.percentile, a.seed)?;
    let mut out = json!({
        "delta": delta,
        "norm": a.norm.to_string(),
        "mc_samples": a.mc_samples,
        "percentile": a.percentile,
        "seed": a.seed,
    });
    if task == Task::Regression {
        out["zero_threshold"] = json!(zero_solution_threshold(&data, a.norm));
    }
    Ok(out)
}
