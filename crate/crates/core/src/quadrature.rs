//! Adaptive Gauss-Legendre quadrature.
//!
//! Density parts of a [`crate::SpectralMeasure`] are integrated against
//! Cauchy kernels `1/(z - t)` and `1/(z - t)^2`. A fixed 15-point rule is
//! applied per panel and panels are bisected until the local estimate
//! stabilizes; this resolves the square-root edge behavior of
//! equilibrium-type densities without special-casing the endpoints.

use crate::C64;

/// 15-point Gauss-Legendre abscissas on [-1, 1] (positive half; the rule is
/// symmetric and node 0.0 is listed once).
const GL_X: [f64; 8] = [
    0.000000000000000,
    0.201194093997435,
    0.394151347077563,
    0.570972172608539,
    0.724417731360170,
    0.848206583410427,
    0.937273392400706,
    0.987992518020485,
];

const GL_W: [f64; 8] = [
    0.202578241925561,
    0.198431485327111,
    0.186161000015562,
    0.166269205816994,
    0.139570677926154,
    0.107159220467172,
    0.070366047488108,
    0.030753241996117,
];

/// Default stabilization tolerance for measure transforms.
pub const QUAD_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 52;

fn gauss15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> C64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = f(mid) * GL_W[0];
    for i in 1..8 {
        let dx = half * GL_X[i];
        acc += (f(mid + dx) + f(mid - dx)) * GL_W[i];
    }
    acc * half
}

fn adaptive<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, whole: C64, tol: f64, depth: u32) -> C64 {
    let mid = 0.5 * (a + b);
    let left = gauss15(f, a, mid);
    let right = gauss15(f, mid, b);
    let refined = left + right;
    let err = (refined - whole).norm();
    // the panel is accepted on stabilization, at the depth cap, or when it
    // has shrunk to floating-point resolution
    if err <= tol.max(tol * refined.norm())
        || depth >= MAX_DEPTH
        || (b - a) <= f64::EPSILON * (a.abs() + b.abs())
    {
        return refined;
    }
    adaptive(f, a, mid, left, tol, depth + 1) + adaptive(f, mid, b, right, tol, depth + 1)
}

/// Integrate a complex-valued function over `[a, b]`, subdividing until the
/// panel estimates stabilize to `tol`.
pub fn integrate_complex<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    if a == b {
        return C64::new(0.0, 0.0);
    }
    let whole = gauss15(f, a, b);
    adaptive(f, a, b, whole, tol, 0)
}

/// Real-valued counterpart of [`integrate_complex`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(&|t| C64::new(f(t), 0.0), a, b, tol).re
}
