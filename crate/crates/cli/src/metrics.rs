use std::collections::BTreeMap;

use advtrain::attack::{adversarial_loss_classification, adversarial_loss_regression, AttackSpec};
use advtrain::{DVector, Dataset, NormKind, Task};

use crate::error::{CliError, CliResult};

/// Clean and worst-case metrics of `beta` on already transformed data.
///
/// Clean values are the adversarial ones at radius zero, so `delta = 0`
/// reproduces them bit for bit. Regression: `r2`, `rmse`, `adv_r2`,
/// `adv_rmse` (from per-sample worst-case squared errors). Classification:
/// `accuracy`, `loss`, `adv_accuracy`, `adv_loss`.
pub fn evaluate(data: &Dataset, beta: &DVector<f64>, norm: NormKind, delta: f64) -> CliResult<BTreeMap<String, f64>> {
    if beta.len() != data.p() {
        return Err(CliError::Data(format!("model has {} coefficients, data has {} features", beta.len(), data.p())));
    }
    let clean = AttackSpec::new(norm, 0.0)?;
    let attack = AttackSpec::new(norm, delta)?;
    let b = beta.as_slice();
    let n = data.n() as f64;
    let rows = (0..data.n()).map(|i| (data.row(i), data.y()[i]));
    let mut m = BTreeMap::new();
    match data.task() {
        Task::Regression => {
            let (se, adv_se) = rows.fold((0.0, 0.0), |(a, c), (x, y)| {
                (a + adversarial_loss_regression(x, y, b, clean), c + adversarial_loss_regression(x, y, b, attack))
            });
            let mean = data.y().mean();
            let ss_tot: f64 = data.y().iter().map(|y| (y - mean).powi(2)).sum();
            m.insert("rmse".into(), (se / n).sqrt());
            m.insert("adv_rmse".into(), (adv_se / n).sqrt());
            // undefined for a constant target
            if ss_tot > 0.0 {
                m.insert("r2".into(), 1.0 - se / ss_tot);
                m.insert("adv_r2".into(), 1.0 - adv_se / ss_tot);
            }
        }
        Task::BinaryClassification => {
            let shift = delta * advtrain::dual_norm(b, norm);
            let (mut hits, mut adv_hits, mut loss, mut adv_loss) = (0usize, 0usize, 0.0, 0.0);
            for (x, y) in rows {
                let margin = y * x.iter().zip(b).map(|(a, c)| a * c).sum::<f64>();
                hits += usize::from(margin > 0.0);
                adv_hits += usize::from(margin - shift > 0.0);
                loss += adversarial_loss_classification(x, y, b, clean);
                adv_loss += adversarial_loss_classification(x, y, b, attack);
            }
            m.insert("accuracy".into(), hits as f64 / n);
            m.insert("adv_accuracy".into(), adv_hits as f64 / n);
            m.insert("loss".into(), loss / n);
            m.insert("adv_loss".into(), adv_loss / n);
        }
    }
    if let Some((k, v)) = m.iter().find(|(_, v)| !v.is_finite()) {
        return Err(CliError::Numerical(format!("metric {k} is {v}")));
    }
    Ok(m)
}
