//! Closed-form transforms for the named measure families.
//!
//! All square roots are taken on the branch fixed by `G(z) ~ 1/z` at
//! infinity: `sqrt(z^2 - c)` is computed as `z * sqrt(1 - c/z^2)` with the
//! principal square root, which is analytic off the support and behaves
//! like `z` for large `|z|`.

use crate::C64;

/// Closed-form measure families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Semicircle distribution of variance `t`, supported on `[-2 sqrt t, 2 sqrt t]`.
    Semicircle { variance: f64 },
    /// Marchenko-Pastur with aspect ratio `c` and scale `s` (edges `s (1 ± sqrt c)^2`,
    /// plus an atom of mass `1 - 1/c` at zero when `c > 1`).
    MarchenkoPastur { ratio: f64, scale: f64 },
    /// Unit mass at `a`.
    PointMass { a: f64 },
    /// `(delta_{-1} + delta_{+1}) / 2`.
    BernoulliSymmetric,
    /// Uniform atoms on a finite list of points.
    Empirical { points: Vec<f64> },
}

/// `sqrt(z^2 - c)` on the branch asymptotic to `z` at infinity.
fn sqrt_z2_minus(z: C64, c: f64) -> C64 {
    z * (C64::new(1.0, 0.0) - c / (z * z)).sqrt()
}

// ---------------------------------------------------------------- semicircle

/// Cancellation-free form of `(z - sqrt(z^2 - 4t))/(2t)`.
pub fn semicircle_cauchy(t: f64, z: C64) -> C64 {
    2.0 / (z + sqrt_z2_minus(z, 4.0 * t))
}

/// `G' = -G/sqrt(z^2 - 4t)` (from `2t G = z - S` and `S' = z/S`).
pub fn semicircle_cauchy_derivative(t: f64, z: C64) -> C64 {
    let s = sqrt_z2_minus(z, 4.0 * t);
    -semicircle_cauchy(t, z) / s
}

pub fn semicircle_r(t: f64, w: C64) -> C64 {
    w * t
}

pub fn semicircle_r_derivative(t: f64, _w: C64) -> C64 {
    C64::new(t, 0.0)
}

pub fn semicircle_density(t: f64, x: f64) -> f64 {
    let s = 4.0 * t - x * x;
    if s <= 0.0 {
        0.0
    } else {
        s.sqrt() / (2.0 * std::f64::consts::PI * t)
    }
}

pub fn semicircle_edge(t: f64) -> f64 {
    2.0 * t.sqrt()
}

/// Exact cumulative distribution function of the semicircle law.
pub fn semicircle_cdf(t: f64, x: f64) -> f64 {
    let r = semicircle_edge(t);
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    let u = (x / r).clamp(-1.0, 1.0);
    0.5 + x * (4.0 * t - x * x).sqrt() / (4.0 * std::f64::consts::PI * t)
        + u.asin() / std::f64::consts::PI
}

// ----------------------------------------------------------- Marchenko-Pastur

pub fn mp_edges(c: f64, s: f64) -> (f64, f64) {
    let sq = c.sqrt();
    (s * (1.0 - sq) * (1.0 - sq), s * (1.0 + sq) * (1.0 + sq))
}

pub fn mp_atom(c: f64) -> Option<f64> {
    if c > 1.0 {
        Some(1.0 - 1.0 / c)
    } else {
        None
    }
}

fn mp_sqrt(c: f64, s: f64, z: C64) -> C64 {
    // sqrt((z - m)^2 - 4 c s^2) with m = s (1 + c), branch ~ z at infinity
    let m = s * (1.0 + c);
    sqrt_z2_minus(z - m, 4.0 * c * s * s)
}

/// Cauchy transform in the cancellation-free form `G = 2 / (z + s(c-1) + S(z))`.
pub fn mp_cauchy(c: f64, s: f64, z: C64) -> C64 {
    2.0 / (z + s * (c - 1.0) + mp_sqrt(c, s, z))
}

pub fn mp_cauchy_derivative(c: f64, s: f64, z: C64) -> C64 {
    let m = s * (1.0 + c);
    let sq = mp_sqrt(c, s, z);
    let g = 2.0 / (z + s * (c - 1.0) + sq);
    // d/dz [2 / (z + s(c-1) + S)] = -G^2 (1 + S') / 2 with S' = (z - m)/S
    -g * g * (C64::new(1.0, 0.0) + (z - m) / sq) * 0.5
}

pub fn mp_r(c: f64, s: f64, w: C64) -> C64 {
    s / (C64::new(1.0, 0.0) - w * (c * s))
}

pub fn mp_r_derivative(c: f64, s: f64, w: C64) -> C64 {
    let d = C64::new(1.0, 0.0) - w * (c * s);
    C64::new(c * s * s, 0.0) / (d * d)
}

pub fn mp_density(c: f64, s: f64, x: f64) -> f64 {
    let (lo, hi) = mp_edges(c, s);
    if x <= lo || x >= hi || x == 0.0 {
        return 0.0;
    }
    ((hi - x) * (x - lo)).sqrt() / (2.0 * std::f64::consts::PI * c * s * x)
}

// ------------------------------------------------------------------ Bernoulli

pub fn bernoulli_r(w: C64) -> C64 {
    if w.norm() < 1e-4 {
        // series of (sqrt(1 + 4 w^2) - 1) / (2 w) around 0
        let w2 = w * w;
        return w * (C64::new(1.0, 0.0) - w2 + 2.0 * w2 * w2);
    }
    ((C64::new(1.0, 0.0) + 4.0 * w * w).sqrt() - 1.0) / (2.0 * w)
}
