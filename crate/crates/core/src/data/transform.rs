use nalgebra::DVector;
use rand::seq::SliceRandom;

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::rng::stream;

/// Affine feature transform `(x - mean) / scale`, plus the target offset
/// removed for regression (the models have no intercept).
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub means: DVector<f64>,
    pub scales: DVector<f64>,
    pub y_mean: f64,
}

impl Standardization {
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.p() != self.means.len() {
            return Err(Error::Dimension(format!("transform has {} features, data has {}", self.means.len(), data.p())));
        }
        let mut x = data.x().clone();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col.apply(|v| *v = (*v - self.means[j]) / self.scales[j]);
        }
        let y = data.y().map(|v| v - self.y_mean);
        Dataset::new(x, y, data.task())
    }

    /// Maps standardized data back to the original units.
    pub fn invert(&self, data: &Dataset) -> Result<Dataset> {
        if data.p() != self.means.len() {
            return Err(Error::Dimension(format!("transform has {} features, data has {}", self.means.len(), data.p())));
        }
        let mut x = data.x().clone();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col.apply(|v| *v = *v * self.scales[j] + self.means[j]);
        }
        let y = data.y().map(|v| v + self.y_mean);
        Dataset::new(x, y, data.task())
    }
}

/// Centres every column and divides by its sample standard deviation
/// (denominator `n - 1`); constant columns keep scale 1. Regression targets
/// are centred too.
pub fn standardize(data: &Dataset) -> Result<(Dataset, Standardization)> {
    let n = data.n() as f64;
    let x = data.x();
    let means = DVector::from_iterator(data.p(), x.column_iter().map(|c| c.sum() / n));
    let scales = DVector::from_iterator(
        data.p(),
        x.column_iter().zip(means.iter()).map(|(c, m)| {
            let ss: f64 = c.iter().map(|v| (v - m).powi(2)).sum();
            let sd = if data.n() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
            if sd > 1e-12 * (1.0 + m.abs()) { sd } else { 1.0 }
        }),
    );
    let y_mean = match data.task() {
        Task::Regression => data.y().sum() / n,
        Task::BinaryClassification => 0.0,
    };
    let t = Standardization { means, scales, y_mean };
    Ok((t.apply(data)?, t))
}

/// Seeded shuffle, then the first `⌈(1 - f) n⌉` rows train and the rest test.
pub fn split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidInput(format!("test fraction must lie in (0, 1), got {test_fraction}")));
    }
    let n = data.n();
    let n_train = ((1.0 - test_fraction) * n as f64 - 1e-9).ceil() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidInput(format!("test fraction {test_fraction} leaves an empty side for n = {n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream(seed, 0x5717));
    Ok((data.select_rows(&idx[..n_train])?, data.select_rows(&idx[n_train..])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn sample() -> Dataset {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 5.0, 2.0, 2.0, 5.0, 4.0, 3.0, 5.0, 6.0, 4.0, 5.0, 9.0]);
        Dataset::new(x, DVector::from_vec(vec![1.0, 2.0, 3.0, 6.0]), Task::Regression).unwrap()
    }

    #[test]
    fn constant_column_keeps_unit_scale() {
        let (s, t) = standardize(&sample()).unwrap();
        assert_eq!(t.scales[1], 1.0);
        assert!(s.x().column(1).iter().all(|v| *v == 0.0));
        for j in [0, 2] {
            let c = s.x().column(j);
            assert!(c.sum().abs() < 1e-12);
            assert!((c.norm_squared() / 3.0 - 1.0).abs() < 1e-12);
        }
        assert!(s.y().sum().abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let d = sample();
        let (s, t) = standardize(&d).unwrap();
        let back = t.invert(&s).unwrap();
        assert!((back.x() - d.x()).amax() <= 1e-12 * d.x().amax());
        assert!((back.y() - d.y()).amax() <= 1e-12 * d.y().amax());
        let (again, t2) = standardize(&s).unwrap();
        assert!(t2.means.amax() < 1e-12 && (t2.scales.add_scalar(-1.0)).amax() < 1e-12);
        assert!((again.x() - s.x()).amax() < 1e-12);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let x = DMatrix::from_fn(10, 1, |i, _| i as f64);
        let d = Dataset::new(x.clone(), x.column(0).into_owned(), Task::Regression).unwrap();
        let (a, b) = split(&d, 0.2, 4).unwrap();
        assert_eq!((a.n(), b.n()), (8, 2));
        let (a2, _) = split(&d, 0.2, 4).unwrap();
        assert_eq!(a.y(), a2.y());
        let mut all: Vec<f64> = a.y().iter().chain(b.y().iter()).copied().collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(f64::from).collect::<Vec<_>>());
        assert!(split(&d, 0.0, 1).is_err() && split(&d, 1.0, 1).is_err());
    }
}
