use std::time::Instant;

use advtrain::data::{load_csv, TargetColumn};
use advtrain::DVector;
use serde_json::json;

use crate::args::EvalArgs;
use crate::error::{CliError, CliResult};
use crate::metrics::evaluate;
use crate::output::write_json;
use crate::train::{ModelFile, RunReport};

/// Scores a saved model on a CSV file. Attacks act on the standardized
/// features the model was trained on, with radius `--delta-eval`.
pub fn cmd_eval(a: &EvalArgs) -> CliResult<RunReport> {
    let start = Instant::now();
    if !(a.delta_eval >= 0.0 && a.delta_eval.is_finite()) {
        return Err(CliError::Usage(format!("--delta-eval must be a finite radius >= 0, got {}", a.delta_eval)));
    }
    let model = ModelFile::read(&a.model)?;
    let task = model.task()?;
    let norm = match a.norm {
        Some(n) => n,
        None => model.norm()?,
    };
    let target: TargetColumn = a.target.parse()?;
    let data = load_csv(&a.data, !a.no_header, &target, task)?;
    if data.p() != model.beta.len() {
        return Err(CliError::Data(format!(
            "{} has {} features but the model expects {}",
            a.data.display(),
            data.p(),
            model.beta.len()
        )));
    }
    let data = model.transform().apply(&data)?;
    let metrics = evaluate(&data, &DVector::from_vec(model.beta.clone()), norm, a.delta_eval)?;
    let report = RunReport {
        config: json!({
            "model": a.model.display().to_string(),
            "data": a.data.display().to_string(),
            "target": a.target,
            "header": !a.no_header,
            "norm": norm.to_string(),
            "delta_eval": a.delta_eval,
        }),
        fit: None,
        metrics,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    Ok(report)
}
