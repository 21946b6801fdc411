//! Minimal dense matrix/vector helpers shared by the feature, model and
//! evaluation code. Nothing here is tuned for large inputs; the test oracle
//! guards its own size limits.

use crate::error::{Error, Result};
use crate::real::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {ncols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {rows}x{cols}={} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// `x^T * self` for a row vector `x` of length `rows`.
    pub fn vecmat(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == T::zero() {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += xr * m;
            }
        }
        out
    }

    pub fn fill(&mut self, v: T) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Solves `A x = b` for several right-hand sides via LU decomposition with
/// partial pivoting. `a` is consumed as workspace. Used only by the dense
/// test oracle; no attempt at blocking or parallelism.
pub fn lu_solve<T: Real>(mut a: Mat<T>, rhs: &mut Mat<T>) -> Result<()> {
    let n = a.rows();
    if a.cols() != n || rhs.rows() != n {
        return Err(Error::Shape(format!(
            "lu_solve expects square system, got {}x{} with rhs {}x{}",
            a.rows(),
            a.cols(),
            rhs.rows(),
            rhs.cols()
        )));
    }
    let m = rhs.cols();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        // Pivot on the largest magnitude entry in this column.
        let mut pivot = col;
        let mut best = a.get(col, col).abs();
        for r in col + 1..n {
            let v = a.get(r, col).abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == T::zero() {
            return Err(Error::Validation("singular matrix in linear solve".into()));
        }
        if pivot != col {
            for c in 0..n {
                let (x, y) = (a.get(col, c), a.get(pivot, c));
                a.set(col, c, y);
                a.set(pivot, c, x);
            }
            perm.swap(col, pivot);
            for c in 0..m {
                let (x, y) = (rhs.get(col, c), rhs.get(pivot, c));
                rhs.set(col, c, y);
                rhs.set(pivot, c, x);
            }
        }
        let inv = T::one() / a.get(col, col);
        for r in col + 1..n {
            let factor = a.get(r, col) * inv;
            if factor == T::zero() {
                continue;
            }
            a.set(r, col, T::zero());
            for c in col + 1..n {
                let v = a.get(r, c) - factor * a.get(col, c);
                a.set(r, c, v);
            }
            for c in 0..m {
                let v = rhs.get(r, c) - factor * rhs.get(col, c);
                rhs.set(r, c, v);
            }
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let inv = T::one() / a.get(col, col);
        for c in 0..m {
            let mut acc = rhs.get(col, c);
            for k in col + 1..n {
                acc = acc - a.get(col, k) * rhs.get(k, c);
            }
            rhs.set(col, c, acc * inv);
        }
    }
    Ok(())
}
