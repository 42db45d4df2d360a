//! Subordination functions of the free additive convolution.
//!
//! For measures `mu`, `nu` and `z` in the upper half-plane, `omega_1(z)` is
//! computed as the attracting (Denjoy-Wolff) fixed point of
//!
//! ```text
//! f_z(w) = h_nu(h_mu(w) + z) + z,      h_tau(w) = F_tau(w) - w,
//! ```
//!
//! and `omega_2(z) = h_mu(omega_1(z)) + z`, so that the pair solves the
//! subordination system `omega_1 - h_nu(omega_2) = z`, `omega_2 -
//! h_mu(omega_1) = z` and `G_{mu ⊞ nu} = G_mu ∘ omega_1 = G_nu ∘ omega_2`.
//!
//! Plain iteration of `f_z` always converges on the open half-plane but its
//! linear rate collapses near the support; iteration is therefore damped
//! when the residual stalls and, once the iterate is close, polished by
//! Newton steps on `f_z(w) - w = 0` (the same fixed point, reached faster).
//! Real boundary values are never obtained by iterating at real `z` —
//! whether the Denjoy-Wolff characterization holds there is open — but by
//! an epsilon-ladder limit `omega(x + i eps)`, `eps -> 0`, with polynomial
//! extrapolation, as licensed by the continuous extension of `omega` to
//! the closed half-plane.

use crate::error::{Error, Result};
use crate::measure::{SpectralMeasure, SupportSet, DENSITY_CUTOFF, POLE_CUTOFF};
use crate::roots::bisect_predicate;
use crate::C64;

/// Iteration budget per evaluation point.
pub const MAX_ITERATIONS: u32 = 10_000;

/// Default epsilon ladder for boundary values and densities.
pub const DEFAULT_LADDER: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Fixed-point tolerance: `1e-12`, relaxed to `1e-10` close to the real axis.
fn fixed_point_tol(z: C64) -> f64 {
    if z.im < 1e-4 {
        1e-10
    } else {
        1e-12
    }
}

/// The subordination pair at one point, with convergence metadata.
#[derive(Debug, Clone, Copy)]
pub struct SubordinationPoint {
    pub z: C64,
    pub omega1: C64,
    pub omega2: C64,
    pub iterations: u32,
    /// Final fixed-point displacement `|f_z(omega1) - omega1|`.
    pub residual: f64,
    /// `h_mu'(omega1) * h_nu'(omega2)`; strictly inside the unit disk on C+.
    pub derivative_product: C64,
}

/// Boundary value of `omega_1` on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryValue {
    Regular(f64),
    /// `x` is an isolated simple pole of `omega_1`.
    Pole,
}

/// Density samples of `mu ⊞ nu` on a grid; points whose fixed-point
/// iteration exhausted its budget are flagged, not fatal.
#[derive(Debug, Clone, Default)]
pub struct DensityProfile {
    pub points: Vec<(f64, f64)>,
    pub failed: Vec<f64>,
}

impl DensityProfile {
    /// CSV rows under the header `x,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,density\n");
        for (x, d) in &self.points {
            out.push_str(&format!("{x},{d}\n"));
        }
        out
    }

    /// Trapezoid integral over the sampled grid.
    pub fn integral(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum()
    }
}

// -------------------------------------------------------------- fixed point

/// Compute the subordination pair at `z` (upper half-plane) by Denjoy-Wolff
/// iteration started at `omega = z`.
pub fn denjoy_wolff(mu: &SpectralMeasure, nu: &SpectralMeasure, z: C64) -> Result<SubordinationPoint> {
    denjoy_wolff_from(mu, nu, z, z)
}

/// Same as [`denjoy_wolff`] but warm-started, which speeds up ladders and
/// grid sweeps considerably near the support.
pub fn denjoy_wolff_from(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    z: C64,
    guess: C64,
) -> Result<SubordinationPoint> {
    if z.im <= 0.0 {
        return Err(Error::Domain(format!("denjoy_wolff needs Im z > 0, got z = {z}")));
    }

    // Point masses shift everything rigidly; Theorem-level iteration excludes
    // them, and the closed forms below are exact.
    if let Some(a) = nu.point_mass_position() {
        let omega1 = z - a;
        let omega2 = mu.h_transform(omega1)? + z;
        return Ok(SubordinationPoint {
            z,
            omega1,
            omega2,
            iterations: 0,
            residual: 0.0,
            derivative_product: C64::new(0.0, 0.0),
        });
    }
    if let Some(a) = mu.point_mass_position() {
        let omega2 = z - a;
        let omega1 = nu.reciprocal_cauchy(omega2)? + a;
        return Ok(SubordinationPoint {
            z,
            omega1,
            omega2,
            iterations: 0,
            residual: 0.0,
            derivative_product: C64::new(0.0, 0.0),
        });
    }

    let tol = fixed_point_tol(z);
    let mut omega = if guess.im > 0.0 { guess } else { z };
    let mut lambda = 1.0; // damping factor; 1.0 = plain iteration
    let mut prev_res = f64::INFINITY;
    let mut stall_marker = f64::INFINITY;
    let mut iterations = 0;

    let step = |omega: C64| -> Result<(C64, C64)> {
        let w = mu.h_transform(omega)? + z;
        let fo = nu.h_transform(w)? + z;
        Ok((fo, w))
    };

    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (fo, w) = step(omega)?;
        let res = (fo - omega).norm();
        if !res.is_finite() {
            return Err(Error::Convergence(format!("iteration diverged at z = {z}")));
        }
        if res <= tol {
            omega = fo;
            converged = true;
            break;
        }

        // Newton polish on f_z(w) - w = 0 once the iterate is in the basin;
        // the multiplier h_mu'(omega) h_nu'(w) has modulus < 1 there, so the
        // Newton denominator stays away from zero.
        if res < 1e-2 {
            if let (Ok(hm), Ok(hn)) = (mu.h_derivative(omega), nu.h_derivative(w)) {
                let denom = hm * hn - 1.0;
                if denom.norm() > 1e-14 {
                    let candidate = omega - (fo - omega) / denom;
                    if candidate.im > 0.0 {
                        if let Ok((fc, _)) = step(candidate) {
                            let cres = (fc - candidate).norm();
                            if cres < 0.5 * res {
                                omega = candidate;
                                prev_res = cres;
                                continue;
                            }
                        }
                    }
                }
            }
        }

        // damped update; escalate damping when 25 iterations brought less
        // than a 10% improvement
        if iterations % 25 == 0 {
            if res > 0.9 * stall_marker && lambda > 0.15 {
                lambda = if lambda > 0.75 { 0.5 } else { 0.1 };
            }
            stall_marker = res;
        }
        let next = omega * (1.0 - lambda) + fo * lambda;
        omega = if next.im > 0.0 { next } else { fo };
        prev_res = res;
    }

    if !converged && prev_res > tol {
        let (fo, _) = step(omega)?;
        if (fo - omega).norm() > tol {
            return Err(Error::Convergence(format!(
                "fixed point at z = {z} stalled at residual {prev_res:.3e} after {iterations} iterations"
            )));
        }
    }

    let (fo, w) = step(omega)?;
    let residual = (fo - omega).norm();
    let derivative_product = mu.h_derivative(omega)? * nu.h_derivative(w)?;
    Ok(SubordinationPoint {
        z,
        omega1: omega,
        omega2: w,
        iterations,
        residual,
        derivative_product,
    })
}

/// `G_{mu ⊞ nu}(z) = G_mu(omega_1(z))` for `z` in the upper half-plane.
pub fn convolution_cauchy(mu: &SpectralMeasure, nu: &SpectralMeasure, z: C64) -> Result<C64> {
    let sp = denjoy_wolff(mu, nu, z)?;
    mu.cauchy_transform(sp.omega1)
}

// ------------------------------------------------------------------ density

/// Polynomial extrapolation to 0 through the points `(eps_i, v_i)`.
fn extrapolate_to_zero(eps: &[f64], vals: &[C64]) -> C64 {
    let n = eps.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut li = 1.0;
        for j in 0..n {
            if j != i {
                li *= eps[j] / (eps[j] - eps[i]);
            }
        }
        acc += vals[i] * li;
    }
    acc
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::Config("epsilon ladder must be nonempty".into()));
    }
    if ladder.iter().any(|&e| !(e > 0.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!("epsilon ladder must be positive and decreasing: {ladder:?}")));
    }
    Ok(())
}

/// Boundary values `-Im G_{mu ⊞ nu}(x + i eps)/pi` on the ladder, one row per
/// grid point, warm-starting the fixed point along both the grid and the
/// ladder. Used by the density and support routines.
fn ladder_values(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    x: f64,
    ladder: &[f64],
    warm: &mut Vec<C64>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ladder.len());
    if warm.len() != ladder.len() {
        warm.clear();
        warm.resize(ladder.len(), C64::new(0.0, -1.0)); // Im<0 marks "no guess"
    }
    let mut prev: Option<C64> = None;
    for (k, &eps) in ladder.iter().enumerate() {
        let z = C64::new(x, eps);
        let guess = prev.or(if warm[k].im > 0.0 { Some(warm[k]) } else { None }).unwrap_or(z);
        let sp = denjoy_wolff_from(mu, nu, z, guess)?;
        warm[k] = sp.omega1;
        prev = Some(sp.omega1);
        let g = mu.cauchy_transform(sp.omega1)?;
        out.push(-g.im / std::f64::consts::PI);
    }
    Ok(out)
}

/// Density of `mu ⊞ nu` along `grid` via the Stieltjes inversion
/// `density(x) = -Im G(x + i eps)/pi`, Richardson-extrapolated across the
/// last three ladder rungs and clipped at zero.
pub fn convolution_density(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    grid: &[f64],
    ladder: &[f64],
) -> Result<DensityProfile> {
    check_ladder(ladder)?;
    let mut profile = DensityProfile::default();
    let mut warm: Vec<C64> = Vec::new();
    let tail = ladder.len().saturating_sub(3);
    for &x in grid {
        match ladder_values(mu, nu, x, ladder, &mut warm) {
            Ok(vals) => {
                let eps: Vec<f64> = ladder[tail..].to_vec();
                let vs: Vec<C64> = vals[tail..].iter().map(|&v| C64::new(v, 0.0)).collect();
                let d = extrapolate_to_zero(&eps, &vs).re;
                profile.points.push((x, d.max(0.0)));
            }
            Err(Error::Convergence(_)) => profile.failed.push(x),
            Err(e) => return Err(e),
        }
    }
    Ok(profile)
}

// ------------------------------------------------------------------ support

/// Decide support membership from the two finest ladder rungs: inside the
/// support the boundary density is of order one across rungs, while outside
/// it decays linearly in `eps` (Poisson tail), so a point counts as inside
/// when the extrapolated density clears the cutoff *and* the finest rung
/// retains at least half of the previous one.
fn inside_support(mu: &SpectralMeasure, nu: &SpectralMeasure, x: f64, warm: &mut Vec<C64>) -> bool {
    let ladder = &DEFAULT_LADDER;
    match ladder_values(mu, nu, x, ladder, warm) {
        Ok(vals) => {
            let n = vals.len();
            let (v4, v5) = (vals[n - 2], vals[n - 1]);
            let eps: Vec<f64> = ladder[n - 3..].to_vec();
            let vs: Vec<C64> = vals[n - 3..].iter().map(|&v| C64::new(v, 0.0)).collect();
            let extrap = extrapolate_to_zero(&eps, &vs).re;
            extrap > DENSITY_CUTOFF && v5 > 0.45 * v4
        }
        Err(_) => false,
    }
}

/// Support of `mu ⊞ nu`: a density scan over the Minkowski sum of the two
/// support hulls, with edges refined by bisection to `1e-6`.
pub fn convolution_support(mu: &SpectralMeasure, nu: &SpectralMeasure) -> SupportSet {
    if let Some(a) = nu.point_mass_position() {
        return SupportSet::new(
            mu.support().intervals().iter().map(|&(lo, hi)| (lo + a, hi + a)).collect(),
        );
    }
    if let Some(a) = mu.point_mass_position() {
        return SupportSet::new(
            nu.support().intervals().iter().map(|&(lo, hi)| (lo + a, hi + a)).collect(),
        );
    }

    let (mu_lo, mu_hi) = mu.support().hull();
    let (nu_lo, nu_hi) = nu.support().hull();
    let (lo, hi) = (mu_lo + nu_lo, mu_hi + nu_hi);
    let pad = 1e-3 * (hi - lo).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);

    let n = 2048;
    let step = (hi - lo) / n as f64;
    let mut warm: Vec<C64> = Vec::new();
    let mask: Vec<bool> = (0..=n)
        .map(|j| inside_support(mu, nu, lo + j as f64 * step, &mut warm))
        .collect();

    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for j in 0..=n {
        match (mask[j], run_start) {
            (true, None) => run_start = Some(j),
            (false, Some(s)) => {
                intervals.push((s, j - 1));
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        intervals.push((s, n));
    }

    let refined: Vec<(f64, f64)> = intervals
        .into_iter()
        .map(|(s, e)| {
            let xs = lo + s as f64 * step;
            let xe = lo + e as f64 * step;
            let left = if s == 0 {
                xs
            } else {
                let mut w = warm.clone();
                bisect_predicate(|x| inside_support(mu, nu, x, &mut w), xs, xs - step, 1e-6)
            };
            let right = if e == n {
                xe
            } else {
                let mut w = warm.clone();
                bisect_predicate(|x| inside_support(mu, nu, x, &mut w), xe, xe + step, 1e-6)
            };
            (left, right)
        })
        .collect();
    SupportSet::new(refined)
}

// ----------------------------------------------------------------- boundary

/// Continuous extension of `omega_1` to a real point `x` outside the support
/// of `mu ⊞ nu`, via the epsilon ladder with extrapolation. The result is
/// real, or the point is reported as a pole of `omega_1`.
pub fn omega_boundary(mu: &SpectralMeasure, nu: &SpectralMeasure, x: f64) -> Result<BoundaryValue> {
    let support = convolution_support(mu, nu);
    omega_boundary_with_support(mu, nu, x, &support)
}

/// [`omega_boundary`] against a precomputed support set (the scan is the
/// expensive part, so batch callers reuse it).
pub fn omega_boundary_with_support(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    x: f64,
    support: &SupportSet,
) -> Result<BoundaryValue> {
    if support.contains(x) {
        return Err(Error::Domain(format!("x = {x} lies in the support of the convolution")));
    }

    if let Some(a) = nu.point_mass_position() {
        return Ok(BoundaryValue::Regular(x - a));
    }
    if let Some(a) = mu.point_mass_position() {
        let g = nu.cauchy_transform(C64::new(x - a, 0.0))?;
        if g.norm() < POLE_CUTOFF {
            return Ok(BoundaryValue::Pole);
        }
        return Ok(BoundaryValue::Regular((1.0 / g).re + a));
    }

    let ladder = &DEFAULT_LADDER;
    let mut omegas: Vec<C64> = Vec::with_capacity(ladder.len());
    let mut prev: Option<C64> = None;
    for &eps in ladder {
        let z = C64::new(x, eps);
        let sp = denjoy_wolff_from(mu, nu, z, prev.unwrap_or(z))?;
        omegas.push(sp.omega1);
        prev = Some(sp.omega1);
    }

    // pole of omega_1: the iterates blow up as eps decreases
    let norms: Vec<f64> = omegas.iter().map(|o| o.norm()).collect();
    let n = norms.len();
    if norms[n - 1] > 1e6 && norms[n - 1] > 5.0 * norms[n - 2] {
        return Ok(BoundaryValue::Pole);
    }

    let tail = n.saturating_sub(3);
    let extrap = extrapolate_to_zero(&ladder[tail..], &omegas[tail..]);
    if extrap.im.abs() < 1e-6 {
        return Ok(BoundaryValue::Regular(extrap.re));
    }
    // accept only if the imaginary parts were actually decaying
    let im_tail: Vec<f64> = omegas[tail..].iter().map(|o| o.im.abs()).collect();
    Err(Error::Boundary(format!(
        "Im omega_1({x} + i eps) does not decay along the ladder: {im_tail:?}, extrapolated {:.3e}",
        extrap.im
    )))
}
