use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Regression,
    BinaryClassification,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Regression => f.write_str("regression"),
            Task::BinaryClassification => f.write_str("classification"),
        }
    }
}

/// Design matrix `X` (n × p), targets `y` and the task they describe.
///
/// Immutable once built. Rows are also kept in a row-major buffer so that
/// per-sample solvers read `xᵢ` contiguously.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
    rows: Vec<f64>,
    task: Task,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, task: Task) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset must have at least one sample and one feature, got {n}x{p}"
            )));
        }
        if y.len() != n {
            return Err(Error::Dimension(format!("X has {n} rows but y has {} entries", y.len())));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("dataset contains NaN or infinite entries".into()));
        }
        if task == Task::BinaryClassification {
            if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
                return Err(Error::InvalidInput(format!(
                    "classification labels must be -1 or +1, found {bad}"
                )));
            }
        }
        let rows = x.transpose().as_slice().to_vec();
        Ok(Self { x, y, rows, task })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// The i-th sample `xᵢ`.
    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.p();
        &self.rows[i * p..(i + 1) * p]
    }

    /// New dataset made of the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Dataset> {
        let x = self.x.select_rows(idx);
        let y = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.y[i]));
        Dataset::new(x, y, self.task)
    }

    pub(crate) fn require(&self, task: Task, solver: &str) -> Result<()> {
        if self.task != task {
            return Err(Error::TaskMismatch {
                solver: solver.to_string(),
                task: self.task.to_string(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_labels_and_shapes() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert!(Dataset::new(x.clone(), DVector::from_vec(vec![0.0, 1.0]), Task::BinaryClassification).is_err());
        assert!(Dataset::new(x.clone(), DVector::from_vec(vec![1.0]), Task::Regression).is_err());
        assert!(Dataset::new(x, DVector::from_vec(vec![f64::NAN, 1.0]), Task::Regression).is_err());
        assert!(Dataset::new(DMatrix::zeros(0, 3), DVector::zeros(0), Task::Regression).is_err());
    }

    #[test]
    fn rows_are_contiguous() {
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let d = Dataset::new(x, DVector::from_vec(vec![1.0, -1.0]), Task::BinaryClassification).unwrap();
        assert_eq!(d.row(1), &[4.0, 5.0, 6.0]);
        let s = d.select_rows(&[1]).unwrap();
        assert_eq!(s.row(0), &[4.0, 5.0, 6.0]);
        assert_eq!(s.y()[0], -1.0);
    }
}
