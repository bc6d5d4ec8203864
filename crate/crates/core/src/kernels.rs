//! Dense matrix-vector kernels and an indexed map, each with a sequential
//! and (behind the `parallel` feature) a rayon implementation.
//!
//! Both implementations accumulate every output entry in the same order, so
//! they agree bit for bit. The top-level functions pick the parallel path for
//! large operands when the feature is enabled.

use nalgebra::{DMatrix, DVector};

/// Row block handled by one task in the row-oriented kernel.
pub const ROW_BLOCK: usize = 256;

/// Below this many matrix entries the sequential kernel is always used.
pub const PARALLEL_MIN_ENTRIES: usize = 1 << 15;

#[cfg(feature = "parallel")]
fn wants_parallel(entries: usize) -> bool {
    entries >= PARALLEL_MIN_ENTRIES
}

/// `X v`.
pub fn matvec(x: &DMatrix<f64>, v: &[f64]) -> DVector<f64> {
    assert_eq!(x.ncols(), v.len(), "matvec: dimension mismatch");
    let mut out = DVector::zeros(x.nrows());
    #[cfg(feature = "parallel")]
    if wants_parallel(x.len()) {
        par::matvec_into(x, v, out.as_mut_slice());
        return out;
    }
    seq::matvec_into(x, v, out.as_mut_slice());
    out
}

/// `Xᵀ u`.
pub fn matvec_t(x: &DMatrix<f64>, u: &[f64]) -> DVector<f64> {
    assert_eq!(x.nrows(), u.len(), "matvec_t: dimension mismatch");
    let mut out = DVector::zeros(x.ncols());
    #[cfg(feature = "parallel")]
    if wants_parallel(x.len()) {
        par::matvec_t_into(x, u, out.as_mut_slice());
        return out;
    }
    seq::matvec_t_into(x, u, out.as_mut_slice());
    out
}

/// `(f(0), ..., f(len - 1))`, evaluated in parallel when available.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        par::map_indexed(len, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq::map_indexed(len, f)
    }
}

pub mod seq {
    use nalgebra::DMatrix;

    pub(crate) fn rows_block(x: &DMatrix<f64>, v: &[f64], start: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let n = x.nrows();
        let len = out.len();
        for (j, &vj) in v.iter().enumerate() {
            let col = &x.as_slice()[j * n + start..j * n + start + len];
            for (o, &xij) in out.iter_mut().zip(col) {
                *o += xij * vj;
            }
        }
    }

    pub fn matvec_into(x: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
        for (b, chunk) in out.chunks_mut(super::ROW_BLOCK).enumerate() {
            rows_block(x, v, b * super::ROW_BLOCK, chunk);
        }
    }

    pub fn matvec_t_into(x: &DMatrix<f64>, u: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = dot(x.column(j).as_slice(), u);
        }
    }

    pub fn map_indexed<T, F: Fn(usize) -> T>(len: usize, f: F) -> Vec<T> {
        (0..len).map(f).collect()
    }

    pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

#[cfg(feature = "parallel")]
pub mod par {
    use nalgebra::DMatrix;
    use rayon::prelude::*;

    pub fn matvec_into(x: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
        out.par_chunks_mut(super::ROW_BLOCK)
            .enumerate()
            .for_each(|(b, chunk)| super::seq::rows_block(x, v, b * super::ROW_BLOCK, chunk));
    }

    pub fn matvec_t_into(x: &DMatrix<f64>, u: &[f64], out: &mut [f64]) {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(j, o)| *o = super::seq::dot(x.column(j).as_slice(), u));
    }

    pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).into_par_iter().map(f).collect()
    }
}
