//! Outlier prediction from the spike equation.
//!
//! A spike `theta` of the deformation generates an outlier at `rho` outside
//! the support of `mu ⊞ nu` exactly when `omega_1(rho) = theta`, which for
//! non-degenerate measures is equivalent to the real root condition
//!
//! ```text
//! h_nu(h_mu(theta) + rho) - theta + rho = 0,
//! 0 < h_mu'(theta) * h_nu'(h_mu(theta) + rho) < 1.
//! ```
//!
//! [`solve_outliers`] scans a window for sign changes of the residual on
//! each piece of the domain of analyticity, refines brackets by safeguarded
//! Newton, and keeps the roots that pass the strict derivative condition,
//! stay clear of the support, and map back to their spike under the
//! boundary extension of `omega_1`. Two special routes replace the scan:
//! the composition `H(z) = z + R_nu(G_mu(z))` when `nu` is freely
//! infinitely divisible (at most one admissible root), and direct inversion
//! of `F_nu` when the bulk of the deformation is a point mass (finite-rank
//! regime, including roots inside bounded spectral gaps).

use crate::error::{Error, Result};
use crate::measure::{Family, SpectralMeasure, SupportSet};
use crate::roots::newton_bisect;
use crate::subordination::{convolution_support, omega_boundary_with_support, BoundaryValue};
use crate::C64;

/// Spikes must sit at least this far outside the support of `mu`.
pub const SPIKE_MARGIN: f64 = 1e-9;

/// Exclusion margin around the support while scanning.
const SCAN_MARGIN: f64 = 1e-4;

/// Roots closer than this to the support boundary are unresolvable.
const BOUNDARY_REJECT: f64 = 1e-6;

/// Residual tolerance for refined roots.
const ROOT_TOL: f64 = 1e-10;

/// Roots of the same spike closer than this are merged.
const DEDUP_TOL: f64 = 1e-9;

/// Strict admissibility window for the derivative product.
const ADMISSIBLE_LO: f64 = 1e-12;
const ADMISSIBLE_HI: f64 = 1.0 - 1e-9;

/// Round-trip tolerance for `omega_1(rho) = theta`.
const OMEGA_ROUNDTRIP_TOL: f64 = 1e-5;

/// One spiked eigenvalue with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub theta: f64,
    pub multiplicity: usize,
}

/// Strictly decreasing spikes `theta_1 > ... > theta_J`, all outside the
/// support of `mu`, with multiplicities summing to the deformation rank.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpikeSet {
    spikes: Vec<Spike>,
}

impl SpikeSet {
    pub fn new(spikes: Vec<(f64, usize)>, mu: &SpectralMeasure) -> Result<Self> {
        let support = mu.support();
        let mut list: Vec<Spike> = spikes
            .into_iter()
            .map(|(theta, multiplicity)| Spike { theta, multiplicity })
            .collect();
        list.sort_by(|a, b| b.theta.partial_cmp(&a.theta).unwrap());
        for pair in list.windows(2) {
            if pair[0].theta == pair[1].theta {
                return Err(Error::Config(format!(
                    "duplicate spike {}; merge it into a single multiplicity",
                    pair[0].theta
                )));
            }
        }
        for s in &list {
            if s.multiplicity == 0 {
                return Err(Error::Config(format!("spike {} has multiplicity 0", s.theta)));
            }
            let d = support.distance(s.theta);
            if d <= SPIKE_MARGIN {
                return Err(Error::Config(format!(
                    "spike {} is inside (or within {SPIKE_MARGIN:.0e} of) the support of mu",
                    s.theta
                )));
            }
        }
        Ok(SpikeSet { spikes: list })
    }

    pub fn empty() -> Self {
        SpikeSet::default()
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    /// Total rank `r` of the deformation.
    pub fn rank(&self) -> usize {
        self.spikes.iter().map(|s| s.multiplicity).sum()
    }
}

/// An admissible root of the spike equation.
#[derive(Debug, Clone, Copy)]
pub struct OutlierPrediction {
    pub rho: f64,
    /// Generating spike.
    pub theta: f64,
    /// Multiplicity inherited from the spike.
    pub multiplicity: usize,
    /// `h_mu'(theta) h_nu'(h_mu(theta) + rho)`; strictly inside `(0, 1)` for
    /// the general route, `0` for the degenerate point-mass routes.
    pub derivative_product: f64,
    pub residual: f64,
    pub distance_to_support: f64,
}

/// Predictions as CSV under the fixed header.
pub fn predictions_to_csv(predictions: &[OutlierPrediction]) -> String {
    let mut out = String::from("rho,theta,multiplicity,derivative_product,residual,distance_to_support\n");
    for p in predictions {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.rho, p.theta, p.multiplicity, p.derivative_product, p.residual, p.distance_to_support
        ));
    }
    out
}

// ------------------------------------------------------------ residual pieces

/// `h_nu(h_mu(theta) + rho) - theta + rho`.
pub fn spike_residual(mu: &SpectralMeasure, nu: &SpectralMeasure, theta: f64, rho: f64) -> Result<f64> {
    let hm = mu.h_transform(C64::new(theta, 0.0))?.re;
    residual_at(nu, hm, theta, rho)
}

fn residual_at(nu: &SpectralMeasure, h_mu_theta: f64, theta: f64, rho: f64) -> Result<f64> {
    let w = C64::new(h_mu_theta + rho, 0.0);
    Ok(nu.h_transform(w)?.re - theta + rho)
}

/// `h_mu'(theta) * h_nu'(h_mu(theta) + rho)`.
pub fn derivative_product(mu: &SpectralMeasure, nu: &SpectralMeasure, theta: f64, rho: f64) -> Result<f64> {
    if mu.point_mass_position().is_some() {
        // h_mu' vanishes identically; the product degenerates and the
        // point-mass route applies instead
        return Ok(0.0);
    }
    let hm = mu.h_transform(C64::new(theta, 0.0))?.re;
    let dm = mu.h_derivative(C64::new(theta, 0.0))?.re;
    let dn = nu.h_derivative(C64::new(hm + rho, 0.0))?.re;
    Ok(dm * dn)
}

// ----------------------------------------------------------------- the solver

/// Default search window and grid step: the support hull inflated by three
/// diameters on each side, with two thousand grid cells per diameter.
pub fn default_window(support: &SupportSet) -> ((f64, f64), f64) {
    let (lo, hi) = support.hull();
    let diam = support.diameter().max(1.0);
    ((lo - 3.0 * diam, hi + 3.0 * diam), diam / 2000.0)
}

/// Solve the spike equation for every spike over `window`, returning the
/// admissible predictions sorted by position. Brackets that fail refinement
/// or admissibility are dropped (and logged at debug level), never fatal.
pub fn solve_outliers(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    spikes: &SpikeSet,
    window: (f64, f64),
    grid_step: f64,
) -> Result<Vec<OutlierPrediction>> {
    if spikes.is_empty() {
        return Ok(Vec::new());
    }
    if !(window.0 < window.1) || !(grid_step > 0.0) {
        return Err(Error::Config(format!(
            "invalid window {window:?} or grid step {grid_step}"
        )));
    }

    // Degenerate bulks collapse the equation; dispatch to the exact routes.
    if let Some(b) = nu.point_mass_position() {
        let support = convolution_support(mu, nu);
        let mut out: Vec<OutlierPrediction> = spikes
            .spikes()
            .iter()
            .map(|s| OutlierPrediction {
                rho: s.theta + b,
                theta: s.theta,
                multiplicity: s.multiplicity,
                derivative_product: 0.0,
                residual: 0.0,
                distance_to_support: support.distance(s.theta + b),
            })
            .collect();
        out.sort_by(|x, y| x.rho.partial_cmp(&y.rho).unwrap());
        return Ok(out);
    }
    if let Some(a) = mu.point_mass_position() {
        let gammas: Vec<(f64, usize)> =
            spikes.spikes().iter().map(|s| (s.theta - a, s.multiplicity)).collect();
        let mut out = outliers_point_mass(nu, &gammas)?;
        for p in &mut out {
            p.rho += a;
            p.theta += a;
        }
        out.sort_by(|x, y| x.rho.partial_cmp(&y.rho).unwrap());
        return Ok(out);
    }

    let support = convolution_support(mu, nu);
    let excluded = support.enlarge(SCAN_MARGIN);
    let nu_support = nu.support();
    let nu_excluded = nu_support.enlarge(SCAN_MARGIN);
    let poles = poles_of_reciprocal(nu);

    let mut predictions: Vec<OutlierPrediction> = Vec::new();
    for spike in spikes.spikes() {
        let theta = spike.theta;
        let hm = mu.h_transform(C64::new(theta, 0.0))?.re;
        let dm = mu.h_derivative(C64::new(theta, 0.0))?.re;

        // rho is admissible for scanning when it avoids the enlarged
        // support of the convolution and w = h_mu(theta) + rho stays off
        // the (enlarged) support of nu; pieces are additionally split at
        // the poles of F_nu so every bracket is analytic.
        let mut cuts: Vec<(f64, f64)> = excluded.intervals().to_vec();
        cuts.extend(nu_excluded.intervals().iter().map(|&(lo, hi)| (lo - hm, hi - hm)));
        let pieces = subtract_intervals(window, &cuts);
        let pole_rhos: Vec<f64> = poles.iter().map(|&p| p - hm).collect();

        let mut roots: Vec<(f64, f64)> = Vec::new(); // (rho, residual)
        for piece in split_at_points(&pieces, &pole_rhos) {
            scan_piece(nu, hm, theta, piece, grid_step, &mut roots);
        }
        roots.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        roots.dedup_by(|a, b| (a.0 - b.0).abs() < DEDUP_TOL);

        for (rho, residual) in roots {
            let dn = match nu.h_derivative(C64::new(hm + rho, 0.0)) {
                Ok(v) => v.re,
                Err(e) => {
                    log::debug!("root {rho} for spike {theta} dropped: {e}");
                    continue;
                }
            };
            let dp = dm * dn;
            if !(ADMISSIBLE_LO < dp && dp < ADMISSIBLE_HI) {
                log::debug!("root {rho} for spike {theta} rejected: derivative product {dp}");
                continue;
            }
            let dist = support.distance(rho);
            if dist <= BOUNDARY_REJECT {
                log::debug!("root {rho} for spike {theta} rejected: {dist:.3e} from the support edge");
                continue;
            }
            match omega_boundary_with_support(mu, nu, rho, &support) {
                Ok(BoundaryValue::Regular(om)) if (om - theta).abs() < OMEGA_ROUNDTRIP_TOL => {}
                other => {
                    log::debug!("root {rho} for spike {theta} failed the omega round trip: {other:?}");
                    continue;
                }
            }
            predictions.push(OutlierPrediction {
                rho,
                theta,
                multiplicity: spike.multiplicity,
                derivative_product: dp,
                residual,
                distance_to_support: dist,
            });
        }
    }
    predictions.sort_by(|x, y| x.rho.partial_cmp(&y.rho).unwrap());
    Ok(predictions)
}

/// Scan one analytic piece for sign changes and refine them.
fn scan_piece(
    nu: &SpectralMeasure,
    hm: f64,
    theta: f64,
    (lo, hi): (f64, f64),
    grid_step: f64,
    roots: &mut Vec<(f64, f64)>,
) {
    if hi - lo < 1e-12 {
        return;
    }
    let res = |rho: f64| residual_at(nu, hm, theta, rho).unwrap_or(f64::NAN);
    let dres = |rho: f64| {
        nu.h_derivative(C64::new(hm + rho, 0.0))
            .map(|v| v.re + 1.0)
            .unwrap_or(f64::NAN)
    };
    let n = (((hi - lo) / grid_step).ceil() as usize).clamp(2, 2_000_000);
    let step = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut f0 = res(x0);
    for j in 1..=n {
        let x1 = lo + j as f64 * step;
        let f1 = res(x1);
        if f0.is_finite() && f1.is_finite() && f0 != 0.0 && f0.signum() != f1.signum() {
            if let Some(root) = newton_bisect(res, dres, x0, x1, ROOT_TOL, 200) {
                roots.push((root.x, root.residual));
            } else {
                log::debug!("bracket [{x0}, {x1}] for spike {theta} failed refinement");
            }
        }
        x0 = x1;
        f0 = f1;
    }
}

/// `window` minus a union of closed intervals.
fn subtract_intervals(window: (f64, f64), cuts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = cuts.to_vec();
    sorted.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut pieces = Vec::new();
    let mut cursor = window.0;
    for &(lo, hi) in &sorted {
        if hi < window.0 || lo > window.1 {
            continue;
        }
        if lo > cursor {
            pieces.push((cursor, lo.min(window.1)));
        }
        cursor = cursor.max(hi);
        if cursor >= window.1 {
            break;
        }
    }
    if cursor < window.1 {
        pieces.push((cursor, window.1));
    }
    pieces
}

/// Split pieces at interior partition points.
fn split_at_points(pieces: &[(f64, f64)], points: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(lo, hi) in pieces {
        let mut inner: Vec<f64> = points.iter().copied().filter(|&p| p > lo && p < hi).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut cursor = lo;
        for p in inner {
            out.push((cursor, p));
            cursor = p;
        }
        out.push((cursor, hi));
    }
    out
}

/// Real poles of `F_nu = 1/G_nu`: one zero of `G_nu` per bounded spectral
/// gap where the (strictly decreasing) transform changes sign.
fn poles_of_reciprocal(nu: &SpectralMeasure) -> Vec<f64> {
    let support = nu.support();
    let margin = 1e-9 * support.diameter().max(1.0);
    let mut poles = Vec::new();
    for (lo, hi) in support.gaps() {
        if hi - lo <= 4.0 * margin {
            continue;
        }
        let g = |x: f64| nu.cauchy_transform(C64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
        let gp = |x: f64| nu.cauchy_derivative(C64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
        if let Some(root) = newton_bisect(g, gp, lo + margin, hi - margin, 1e-13, 200) {
            poles.push(root.x);
        }
    }
    poles
}

// ----------------------------------------------------- infinitely divisible

/// Outlier location via `H(z) = z + R_nu(G_mu(z))` for freely infinitely
/// divisible `nu` (closed-form R-transform): the unique admissible root is
/// `rho = H(theta)` exactly when `H'(theta) > 0`; otherwise there is none.
pub fn outliers_infdiv(mu: &SpectralMeasure, nu: &SpectralMeasure, theta: f64) -> Result<Option<f64>> {
    match nu.family() {
        Some(Family::Semicircle { .. })
        | Some(Family::MarchenkoPastur { .. })
        | Some(Family::PointMass { .. }) => {}
        _ => {
            return Err(Error::Family(
                "outliers_infdiv needs nu with a closed-form R-transform (semicircle, \
                 marchenko_pastur, point_mass)"
                    .into(),
            ))
        }
    }
    let h_cap = |x: f64| -> Result<f64> {
        let g = mu.cauchy_transform(C64::new(x, 0.0))?;
        Ok(x + nu.r_transform(g)?.re)
    };
    let rho = h_cap(theta)?;
    if !rho.is_finite() {
        return Ok(None);
    }

    // H' two ways: analytic composition and central differences at 1e-7
    let g = mu.cauchy_transform(C64::new(theta, 0.0))?;
    let analytic = 1.0 + (nu.r_derivative(g)? * mu.cauchy_derivative(C64::new(theta, 0.0))?).re;
    let step = 1e-7;
    let fd = (h_cap(theta + step)? - h_cap(theta - step)?) / (2.0 * step);
    if (analytic - fd).abs() > 1e-6 * analytic.abs().max(1.0) {
        return Err(Error::Convergence(format!(
            "H'({theta}) disagrees between routes: analytic {analytic}, finite-difference {fd}"
        )));
    }
    Ok(if analytic > 0.0 { Some(rho) } else { None })
}

// ------------------------------------------------------------ finite rank

/// Finite-rank (point-mass bulk) outliers: for `mu = delta_0` the equation
/// collapses to `F_nu(rho) = gamma`, solved on the two unbounded components
/// (threshold behavior of the extreme eigenvalues) and inside every bounded
/// spectral gap of `nu`. Sub-threshold spikes produce no prediction.
pub fn outliers_point_mass(
    nu: &SpectralMeasure,
    gammas: &[(f64, usize)],
) -> Result<Vec<OutlierPrediction>> {
    let support = nu.support();
    let (a, b) = support.hull();
    let diam = support.diameter().max(1.0);
    let margin = 1e-9 * diam;
    let poles = poles_of_reciprocal(nu);

    let g_re = |x: f64| nu.cauchy_transform(C64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
    let gp_re = |x: f64| nu.cauchy_derivative(C64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);

    let mut out = Vec::new();
    for &(gamma, multiplicity) in gammas {
        if gamma == 0.0 {
            return Err(Error::Domain("spike gamma must be nonzero for a point-mass bulk".into()));
        }
        let target = 1.0 / gamma;
        let mut push = |rho: f64| {
            let dist = support.distance(rho);
            if dist <= BOUNDARY_REJECT {
                log::debug!("finite-rank root {rho} too close to the support edge");
                return;
            }
            let residual = match nu.reciprocal_cauchy(C64::new(rho, 0.0)) {
                Ok(f) => (f.re - gamma).abs(),
                Err(_) => return,
            };
            out.push(OutlierPrediction {
                rho,
                theta: gamma,
                multiplicity,
                derivative_product: 0.0,
                residual,
                distance_to_support: dist,
            });
        };

        if gamma > 0.0 {
            // right of the support: G decreases from its edge limit to 0+
            if g_re(b + margin) > target {
                let mut hi = b + diam.max(gamma.abs());
                while g_re(hi) > target {
                    hi = b + 2.0 * (hi - b);
                }
                if let Some(root) =
                    newton_bisect(|x| g_re(x) - target, gp_re, b + margin, hi, 1e-13, 200)
                {
                    push(root.x);
                }
            }
        } else {
            // left of the support: G decreases from 0- to the edge limit
            if g_re(a - margin) < target {
                let mut lo = a - diam.max(gamma.abs());
                while g_re(lo) < target {
                    lo = a - 2.0 * (a - lo);
                }
                if let Some(root) =
                    newton_bisect(|x| g_re(x) - target, gp_re, lo, a - margin, 1e-13, 200)
                {
                    push(root.x);
                }
            }
        }

        // bounded gaps, split at the pole of F so each side is monotone
        for (lo, hi) in support.gaps() {
            if hi - lo <= 4.0 * margin {
                continue;
            }
            let mut ends = vec![lo + margin];
            for &p in &poles {
                if p > lo + margin && p < hi - margin {
                    ends.push(p - margin);
                    ends.push(p + margin);
                }
            }
            ends.push(hi - margin);
            for pair in ends.chunks(2) {
                if let [l, h] = pair {
                    if let Some(root) =
                        newton_bisect(|x| g_re(x) - target, gp_re, *l, *h, 1e-13, 200)
                    {
                        push(root.x);
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| x.rho.partial_cmp(&y.rho).unwrap());
    out.dedup_by(|p, q| (p.rho - q.rho).abs() < DEDUP_TOL && p.theta == q.theta);
    Ok(out)
}
