//! Self-contained complex Hermitian eigensolver.
//!
//! The matrix is reduced to real tridiagonal form by Householder
//! reflections working on the lower triangle (the complex off-diagonals are
//! phase-rotated to their moduli, which leaves the spectrum unchanged), and
//! the tridiagonal eigenvalues are extracted by the implicit QL iteration
//! with Wilkinson shifts. Eigenvalues only; no vectors are accumulated.

use crate::error::{Error, Result};
use crate::C64;

use super::cmatrix::CMatrix;

/// Eigenvalues of a Hermitian matrix, sorted nonincreasing.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    if h.n_rows() != h.n_cols() {
        return Err(Error::Size(format!("matrix is {}x{}, not square", h.n_rows(), h.n_cols())));
    }
    let defect = h.hermitian_defect();
    if defect >= 1e-10 {
        return Err(Error::Domain(format!("matrix is not Hermitian: max |H - H^*| = {defect:.3e}")));
    }
    let mut work = h.clone();
    let (d, e) = tridiagonalize(&mut work);
    let mut eig = tridiagonal_eigenvalues(d, e)?;
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(eig)
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form; returns the diagonal and the off-diagonal moduli. Only the lower
/// triangle of `a` is referenced or updated.
fn tridiagonalize(a: &mut CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.n_rows();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut w = vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(1) {
        d[k] = a.get(k, k).re;
        let m = n - k - 1;
        let mut norm2 = 0.0;
        for i in 0..m {
            let z = a.get(k + 1 + i, k);
            v[i] = z;
            norm2 += z.norm_sqr();
        }
        let norm = norm2.sqrt();
        e[k] = norm;
        if norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let beta = -phase * norm;
        v[0] = x0 - beta;
        let vnorm2: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // w = tau (A22 v - (tau/2) (v^H A22 v) v), single pass over the
        // lower triangle of the trailing block
        w[..m].fill(C64::new(0.0, 0.0));
        for i in 0..m {
            let row_base = k + 1 + i;
            let vi = v[i];
            let mut acc = C64::new(0.0, 0.0);
            let row = &a.row(row_base)[k + 1..k + 1 + i + 1];
            for j in 0..i {
                let aij = row[j];
                acc += aij * v[j];
                w[j] += aij.conj() * vi;
            }
            w[i] += acc + row[i] * vi;
        }
        for wi in w[..m].iter_mut() {
            *wi *= tau;
        }
        let vhw: C64 = (0..m).map(|i| v[i].conj() * w[i]).sum();
        let corr = vhw * (tau * 0.5);
        for i in 0..m {
            w[i] -= corr * v[i];
        }

        // Hermitian rank-2 update A22 -= v w^H + w v^H (lower triangle)
        for i in 0..m {
            let row_base = k + 1 + i;
            let vi = v[i];
            let wi = w[i];
            let row = &mut a.row_mut(row_base)[k + 1..k + 1 + i + 1];
            for j in 0..=i {
                row[j] -= vi * w[j].conj() + wi * v[j].conj();
            }
        }
    }
    if n >= 1 {
        d[n - 1] = a.get(n - 1, n - 1).re;
    }
    (d, e)
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n <= 1 {
        return Ok(d);
    }
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0u32;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::Convergence(format!(
                    "QL iteration exceeded its budget at row {l}"
                )));
            }
            // Wilkinson shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}
