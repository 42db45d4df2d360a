//! Dense row-major complex matrices with exactly the kernels the random
//! matrix harness needs: multiply (SIMD gemm), conjugate transpose, diagonal
//! scaling, Hermitian cleanup, and a pivoted solve for resolvent columns.

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            for (j, v) in row.iter().enumerate() {
                out.data[j * self.rows + i] = v.conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `diag(d) * self` (scales row `i` by `d[i]`).
    pub fn scale_rows(&self, d: &[f64]) -> CMatrix {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for i in 0..self.rows {
            let s = d[i];
            for v in out.row_mut(i) {
                *v *= s;
            }
        }
        out
    }

    pub fn add_diag(&mut self, d: &[f64]) {
        assert_eq!(d.len(), self.rows.min(self.cols));
        for (i, &x) in d.iter().enumerate() {
            let v = self.get(i, i) + x;
            self.set(i, i, v);
        }
    }

    /// Matrix product via the `matrixmultiply` complex gemm kernels.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                self.rows,
                self.cols,
                other.cols,
                [1.0, 0.0],
                self.data.as_ptr() as *const [f64; 2],
                self.cols as isize,
                1,
                other.data.as_ptr() as *const [f64; 2],
                other.cols as isize,
                1,
                [0.0, 0.0],
                out.data.as_mut_ptr() as *mut [f64; 2],
                other.cols as isize,
                1,
            );
        }
        out
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Replace the matrix by `(A + A^H)/2`.
    pub fn hermitize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in i..self.cols {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                self.set(i, j, v);
                self.set(j, i, v.conj());
            }
        }
    }

    /// `max |U^H U - I|`, the unitarity defect.
    pub fn unitary_defect(&self) -> f64 {
        let p = self.conj_transpose().mul(self);
        let n = p.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((p.get(i, j) - target).norm());
            }
        }
        worst
    }

    /// Solve `A X = B` by Gaussian elimination with partial pivoting,
    /// consuming `A`. `B` has one column per requested solution.
    pub fn solve_columns(mut self, rhs: &CMatrix) -> Result<CMatrix> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(rhs.rows, self.rows, "rhs dimension mismatch");
        let n = self.rows;
        let mut x = rhs.clone();
        let scale: f64 = self.data.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        for k in 0..n {
            // pivot
            let (mut p, mut best) = (k, self.get(k, k).norm());
            for i in k + 1..n {
                let m = self.get(i, k).norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best < 1e-14 * scale {
                return Err(Error::Singular(format!(
                    "pivot {best:.3e} at column {k}; shift hits the spectrum"
                )));
            }
            if p != k {
                self.swap_rows(k, p);
                x.swap_rows(k, p);
            }
            let inv = 1.0 / self.get(k, k);
            for i in k + 1..n {
                let factor = self.get(i, k) * inv;
                if factor.norm() == 0.0 {
                    continue;
                }
                self.set(i, k, factor);
                let (above, below) = self.data.split_at_mut(i * n);
                let arow = &above[k * n + k + 1..k * n + n];
                let irow = &mut below[k + 1..n];
                for (dst, src) in irow.iter_mut().zip(arow) {
                    *dst -= factor * *src;
                }
                let (xa, xb) = x.data.split_at_mut(i * x.cols);
                let krow = &xa[k * x.cols..(k + 1) * x.cols];
                for (dst, src) in xb[..x.cols].iter_mut().zip(krow) {
                    *dst -= factor * *src;
                }
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let inv = 1.0 / self.get(k, k);
            for c in 0..x.cols {
                let mut acc = x.get(k, c);
                for j in k + 1..n {
                    acc -= self.get(k, j) * x.get(j, c);
                }
                x.set(k, c, acc * inv);
            }
        }
        Ok(x)
    }
}

impl CMatrix {
    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        let cols = self.cols;
        let (a, b) = if r1 < r2 {
            let (x, y) = self.data.split_at_mut(r2 * cols);
            (&mut x[r1 * cols..(r1 + 1) * cols], &mut y[..cols])
        } else {
            let (x, y) = self.data.split_at_mut(r1 * cols);
            (&mut y[..cols], &mut x[r2 * cols..(r2 + 1) * cols])
        };
        a.swap_with_slice(b);
    }
}

/// Small determinant via pivoted elimination (used for the r x r block).
pub fn determinant(mut a: CMatrix) -> C64 {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let (mut p, mut best) = (k, a.get(k, k).norm());
        for i in k + 1..n {
            let m = a.get(i, k).norm();
            if m > best {
                best = m;
                p = i;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            a.swap_rows(k, p);
            det = -det;
        }
        let pivot = a.get(k, k);
        det *= pivot;
        let inv = 1.0 / pivot;
        for i in k + 1..n {
            let factor = a.get(i, k) * inv;
            for j in k + 1..n {
                let v = a.get(i, j) - factor * a.get(k, j);
                a.set(i, j, v);
            }
        }
    }
    det
}
