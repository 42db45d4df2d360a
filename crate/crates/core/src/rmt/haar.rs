//! Haar-distributed unitary matrices.
//!
//! `U` is obtained as the Q factor of a QR decomposition of an i.i.d.
//! standard complex Gaussian matrix, with the column phases corrected by
//! `U <- Q diag(R_kk / |R_kk|)`. Without the phase correction the law of Q
//! depends on the QR convention; with it the law is exactly Haar.
//!
//! The factorization and the back-accumulation of `Q` use compact-WY block
//! reflectors (`I - V T V^H` per panel) so the bulk of the work runs inside
//! the SIMD gemm kernels rather than rank-1 updates.

use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::cmatrix::CMatrix;

/// Panel width for the blocked factorization.
const BLOCK: usize = 48;

/// Seeded ChaCha stream: counter-based, with `set_stream` as the jump-ahead
/// for independent per-trial streams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let scale = 0.5f64.sqrt();
    CMatrix::from_fn(n, n, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal) * scale,
            rng.sample::<f64, _>(StandardNormal) * scale,
        )
    })
}

/// One panel of Householder reflectors in compact-WY form:
/// `H_{j0} H_{j0+1} ... = I - V T V^H` on rows `j0..n`.
struct Panel {
    j0: usize,
    /// `(n - j0) x nb`, zero above the per-column start row.
    v: CMatrix,
    /// `nb x nb` upper triangular.
    t: CMatrix,
}

struct QrFactors {
    panels: Vec<Panel>,
    rdiag: Vec<C64>,
}

/// `W = V^H C` for the rows `rows0..n` of `c`, columns `cols0..n`.
fn block_apply(panel: &Panel, c: &mut CMatrix, cols0: usize, transpose_t: bool) {
    let n = c.n_rows();
    let s = n - panel.j0;
    let nb = panel.v.n_cols();
    let m = c.n_cols() - cols0;
    if m == 0 || nb == 0 {
        return;
    }
    // W = V^H * C[j0.., cols0..]   (nb x m)
    let vh = panel.v.conj_transpose();
    let mut w = CMatrix::zeros(nb, m);
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            nb,
            s,
            m,
            [1.0, 0.0],
            vh.row(0).as_ptr() as *const [f64; 2],
            s as isize,
            1,
            c.row(panel.j0)[cols0..].as_ptr() as *const [f64; 2],
            c.n_cols() as isize,
            1,
            [0.0, 0.0],
            w.row_mut(0).as_mut_ptr() as *mut [f64; 2],
            m as isize,
            1,
        );
    }
    // W <- T W or T^H W (small triangular multiply)
    let mut tw = CMatrix::zeros(nb, m);
    for i in 0..nb {
        for k in 0..nb {
            let tik = if transpose_t { panel.t.get(k, i).conj() } else { panel.t.get(i, k) };
            if tik.norm_sqr() == 0.0 {
                continue;
            }
            let wrow = w.row(k);
            let trow = tw.row_mut(i);
            for (dst, &src) in trow.iter_mut().zip(wrow) {
                *dst += tik * src;
            }
        }
    }
    // C[j0.., cols0..] -= V * TW
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            s,
            nb,
            m,
            [-1.0, 0.0],
            panel.v.row(0).as_ptr() as *const [f64; 2],
            nb as isize,
            1,
            tw.row(0).as_ptr() as *const [f64; 2],
            m as isize,
            1,
            [1.0, 0.0],
            c.row_mut(panel.j0)[cols0..].as_mut_ptr() as *mut [f64; 2],
            c.n_cols() as isize,
            1,
        );
    }
}

fn householder_qr(a: &mut CMatrix) -> QrFactors {
    let n = a.n_rows();
    let mut rdiag = vec![C64::new(0.0, 0.0); n];
    let mut panels = Vec::new();
    let mut j0 = 0;
    while j0 + 1 < n {
        let nb = BLOCK.min(n - j0 - 1).max(1);
        let s = n - j0;
        let mut v = CMatrix::zeros(s, nb);
        let mut taus = vec![0.0f64; nb];

        // factor the panel column by column (updates stay inside the panel)
        for jj in 0..nb {
            let col = j0 + jj;
            // reflector from rows col..n of column col
            let m = n - col;
            let mut x: Vec<C64> = (0..m).map(|i| a.get(col + i, col)).collect();
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                rdiag[col] = C64::new(0.0, 0.0);
                continue;
            }
            let x0 = x[0];
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
            let beta = -phase * norm;
            x[0] = x0 - beta;
            let vnorm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            let tau = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
            rdiag[col] = beta;
            taus[jj] = tau;
            for i in 0..m {
                v.set(jj + i, jj, x[i]);
            }
            // apply to the remaining panel columns
            for cc in jj + 1..nb {
                let target = j0 + cc;
                let mut dot = C64::new(0.0, 0.0);
                for i in 0..m {
                    dot += x[i].conj() * a.get(col + i, target);
                }
                dot *= tau;
                for i in 0..m {
                    let val = a.get(col + i, target) - x[i] * dot;
                    a.set(col + i, target, val);
                }
            }
        }

        // compact-WY T: T[..i, i] = -tau_i T[..i, ..i] (V^H v_i)
        let mut t = CMatrix::zeros(nb, nb);
        for i in 0..nb {
            t.set(i, i, C64::new(taus[i], 0.0));
            if taus[i] == 0.0 {
                continue;
            }
            let mut y = vec![C64::new(0.0, 0.0); i];
            for row in i..s {
                let vi = v.get(row, i);
                if vi.norm_sqr() == 0.0 {
                    continue;
                }
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += v.get(row, k).conj() * vi;
                }
            }
            for r in 0..i {
                let mut acc = C64::new(0.0, 0.0);
                for (k, yk) in y.iter().enumerate() {
                    acc += t.get(r, k) * *yk;
                }
                t.set(r, i, acc * (-taus[i]));
            }
        }

        let panel = Panel { j0, v, t };
        // apply Q_panel^H to the trailing columns
        block_apply(&panel, a, j0 + nb, true);
        panels.push(panel);
        j0 += nb;
    }
    if n >= 1 {
        // the last column receives no reflector; its R entry is what remains
        rdiag[n - 1] = a.get(n - 1, n - 1);
    }
    QrFactors { panels, rdiag }
}

/// Back-accumulate `Q = (I - V_1 T_1 V_1^H) ... (I - V_p T_p V_p^H) I`
/// by applying the block reflectors to the identity in reverse order.
fn accumulate_q(factors: &QrFactors, n: usize) -> CMatrix {
    let mut q = CMatrix::identity(n);
    for panel in factors.panels.iter().rev() {
        // columns to the left of j0 are still identity columns with support
        // above row j0, untouched by this panel
        block_apply(panel, &mut q, panel.j0, false);
    }
    q
}

/// Sample an `n x n` Haar unitary from the given RNG.
pub fn haar_unitary_from_rng(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    assert!(n >= 1, "haar_unitary needs n >= 1");
    let mut g = complex_gaussian(n, rng);
    let factors = householder_qr(&mut g);
    let mut q = accumulate_q(&factors, n);
    // phase correction: scale column k by R_kk/|R_kk|
    for k in 0..n {
        let r = factors.rdiag[k];
        let phase = if r.norm() > 0.0 { r / r.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            let v = q.get(i, k) * phase;
            q.set(i, k, v);
        }
    }
    q
}

/// Sample an `n x n` Haar unitary deterministically from a 64-bit seed
/// (stream 0 of the seeded generator).
pub fn haar_unitary(n: usize, seed: u64) -> CMatrix {
    haar_unitary_from_rng(n, &mut stream_rng(seed, 0))
}
