//! Compactly supported probability measures on the real line and their
//! analytic transforms.
//!
//! A [`SpectralMeasure`] is a sum of weighted atoms and a piecewise-linear
//! grid density, optionally tagged as a closed-form [`Family`]. Family
//! measures evaluate their Cauchy transform `G`, reciprocal transform
//! `F = 1/G`, shift `h = F - z`, and R-transform from closed forms; all
//! other measures go through atom sums plus adaptive quadrature of the
//! density against the Cauchy kernel.

mod family;
mod json;

pub use family::Family;
pub use json::MeasureSpec;

use crate::error::{Error, Result};
use crate::quadrature::{self, QUAD_TOL};
use crate::C64;

/// Total mass must equal one within this tolerance.
pub const MASS_TOL: f64 = 1e-10;

/// Grid densities below this value do not count as support.
pub const DENSITY_CUTOFF: f64 = 1e-8;

/// `|G|` below this value makes `F = 1/G` a pole.
pub const POLE_CUTOFF: f64 = 1e-12;

/// Real evaluation points must be farther than this from the support.
pub const SUPPORT_DISTANCE_CUTOFF: f64 = 1e-12;

/// Node count used when a closed-form density is rendered onto a grid.
const RENDER_NODES: usize = 4000;

/// One piece of an absolutely continuous part: a piecewise-linear density
/// on `[a, b]` given by values at an ordered node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityInterval {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityInterval {
    fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(Error::Measure(format!(
                "density interval [{}, {}] is not a bounded interval",
                self.a, self.b
            )));
        }
        if self.nodes.len() < 2 || self.nodes.len() != self.values.len() {
            return Err(Error::Measure(
                "density interval needs >= 2 nodes with one value per node".into(),
            ));
        }
        for pair in self.nodes.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::Measure("density nodes must be strictly increasing".into()));
            }
        }
        if self.nodes[0] < self.a - 1e-12 || *self.nodes.last().unwrap() > self.b + 1e-12 {
            return Err(Error::Measure("density nodes must lie inside [a, b]".into()));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Measure("density values must be nonnegative".into()));
        }
        Ok(())
    }

    /// Exact integral of the piecewise-linear interpolant (trapezoid rule).
    fn mass(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0]))
            .sum()
    }

    fn value_at(&self, x: f64) -> f64 {
        if x < self.nodes[0] || x > *self.nodes.last().unwrap() {
            return 0.0;
        }
        let j = match self.nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(j) => return self.values[j],
            Err(j) => j - 1,
        };
        let (x0, x1) = (self.nodes[j], self.nodes[j + 1]);
        let t = (x - x0) / (x1 - x0);
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }

    /// Integral of the density from the left end up to `x`.
    fn partial_mass(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (w, v) in self.nodes.windows(2).zip(self.values.windows(2)) {
            if x >= w[1] {
                acc += 0.5 * (v[0] + v[1]) * (w[1] - w[0]);
            } else if x > w[0] {
                let t = x - w[0];
                let slope = (v[1] - v[0]) / (w[1] - w[0]);
                acc += v[0] * t + 0.5 * slope * t * t;
                break;
            } else {
                break;
            }
        }
        acc
    }

    /// Integrate `f` against the interpolated density with the adaptive rule,
    /// splitting at the nodes so every panel sees a smooth integrand.
    fn integrate<F: Fn(f64) -> C64>(&self, f: &F, tol: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (w, v) in self.nodes.windows(2).zip(self.values.windows(2)) {
            let (x0, x1) = (w[0], w[1]);
            let (v0, v1) = (v[0], v[1]);
            if v0 == 0.0 && v1 == 0.0 {
                continue;
            }
            let slope = (v1 - v0) / (x1 - x0);
            acc += quadrature::integrate_complex(&|t| f(t) * (v0 + slope * (t - x0)), x0, x1, tol);
        }
        acc
    }
}

// ------------------------------------------------------------------- support

/// A finite union of disjoint closed intervals, optionally recorded together
/// with the radius by which it has been enlarged.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    intervals: Vec<(f64, f64)>,
    epsilon: f64,
}

impl SupportSet {
    /// Sorts and merges the given closed intervals.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Self {
        intervals.retain(|(a, b)| a.is_finite() && b.is_finite() && a <= b);
        intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        SupportSet { intervals: merged, epsilon: 0.0 }
    }

    /// Inflate every interval by `eps` and merge the overlaps.
    pub fn enlarge(&self, eps: f64) -> SupportSet {
        assert!(eps >= 0.0, "enlargement radius must be nonnegative");
        let mut s = SupportSet::new(
            self.intervals.iter().map(|&(a, b)| (a - eps, b + eps)).collect(),
        );
        s.epsilon = self.epsilon + eps;
        s
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Distance from `x` to the set (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        self.intervals
            .iter()
            .map(|&(a, b)| if x < a { a - x } else if x > b { x - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    /// Convex hull `[min, max]`.
    pub fn hull(&self) -> (f64, f64) {
        (self.min(), self.max())
    }

    pub fn min(&self) -> f64 {
        self.intervals.first().map_or(f64::NAN, |i| i.0)
    }

    pub fn max(&self) -> f64 {
        self.intervals.last().map_or(f64::NAN, |i| i.1)
    }

    pub fn diameter(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.max() - self.min()
        }
    }

    /// The bounded open gaps between consecutive intervals.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    /// Support rows as `left,right` CSV lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right\n");
        for (a, b) in &self.intervals {
            out.push_str(&format!("{a},{b}\n"));
        }
        out
    }
}

// ------------------------------------------------------------------- measure

/// A compactly supported probability measure: weighted atoms plus a
/// piecewise-linear density, optionally backed by a closed-form family.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    density: Vec<DensityInterval>,
    family: Option<Family>,
}

impl SpectralMeasure {
    // -------------------------------------------------------- constructors

    pub fn semicircle(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::Measure(format!("semicircle variance must be > 0, got {variance}")));
        }
        Ok(SpectralMeasure { atoms: vec![], density: vec![], family: Some(Family::Semicircle { variance }) })
    }

    pub fn marchenko_pastur(ratio: f64, scale: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(Error::Measure(format!(
                "marchenko_pastur needs ratio > 0 and scale > 0, got ({ratio}, {scale})"
            )));
        }
        let atoms = family::mp_atom(ratio).map(|m| vec![(0.0, m)]).unwrap_or_default();
        Ok(SpectralMeasure { atoms, density: vec![], family: Some(Family::MarchenkoPastur { ratio, scale }) })
    }

    pub fn point_mass(a: f64) -> Self {
        SpectralMeasure { atoms: vec![(a, 1.0)], density: vec![], family: Some(Family::PointMass { a }) }
    }

    pub fn bernoulli_symmetric() -> Self {
        SpectralMeasure {
            atoms: vec![(-1.0, 0.5), (1.0, 0.5)],
            density: vec![],
            family: Some(Family::BernoulliSymmetric),
        }
    }

    pub fn empirical(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Measure("empirical measure needs at least one point".into()));
        }
        let w = 1.0 / points.len() as f64;
        let mut m = SpectralMeasure {
            atoms: points.iter().map(|&p| (p, w)).collect(),
            density: vec![],
            family: Some(Family::Empirical { points: points.to_vec() }),
        };
        m.normalize_atoms()?;
        Ok(m)
    }

    /// Build from raw atoms (positions and weights).
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::from_parts(atoms, vec![])
    }

    /// Build from atoms plus grid-density intervals; validates all measure
    /// invariants (unit mass, nonnegative density, bounded support).
    pub fn from_parts(atoms: Vec<(f64, f64)>, density: Vec<DensityInterval>) -> Result<Self> {
        let mut m = SpectralMeasure { atoms, density, family: None };
        m.normalize_atoms()?;
        for itv in &m.density {
            itv.validate()?;
        }
        m.density.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
        let mass = m.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::Measure(format!("total mass is {mass}, must be 1 within {MASS_TOL}")));
        }
        Ok(m)
    }

    fn normalize_atoms(&mut self) -> Result<()> {
        for &(p, w) in &self.atoms {
            if !p.is_finite() {
                return Err(Error::Measure(format!("atom position {p} is not finite")));
            }
            if !(w > 0.0 && w <= 1.0 + MASS_TOL) {
                return Err(Error::Measure(format!("atom weight {w} is outside (0, 1]")));
            }
        }
        self.atoms.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        // merge duplicated positions
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.atoms.len());
        for &(p, w) in &self.atoms {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += w,
                _ => merged.push((p, w)),
            }
        }
        self.atoms = merged;
        Ok(())
    }

    // ------------------------------------------------------------ accessors

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density_intervals(&self) -> &[DensityInterval] {
        &self.density
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    /// Total mass (atoms plus exact integral of the density part).
    pub fn mass(&self) -> f64 {
        if self.family.is_some() && self.density.is_empty() {
            return 1.0;
        }
        let atom_mass: f64 = self.atoms.iter().map(|a| a.1).sum();
        atom_mass + self.density.iter().map(DensityInterval::mass).sum::<f64>()
    }

    /// `Some(a)` when the measure is the unit point mass at `a`.
    pub fn point_mass_position(&self) -> Option<f64> {
        if let Some(Family::PointMass { a }) = self.family {
            return Some(a);
        }
        if self.density.is_empty() && self.atoms.len() == 1 && (self.atoms[0].1 - 1.0).abs() <= MASS_TOL {
            return Some(self.atoms[0].0);
        }
        None
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_empty()
            && !matches!(
                self.family,
                Some(Family::Semicircle { .. }) | Some(Family::MarchenkoPastur { .. })
            )
    }

    /// Density of the absolutely continuous part at `x` (atoms excluded).
    pub fn density_at(&self, x: f64) -> f64 {
        match &self.family {
            Some(Family::Semicircle { variance }) => family::semicircle_density(*variance, x),
            Some(Family::MarchenkoPastur { ratio, scale }) => family::mp_density(*ratio, *scale, x),
            _ => self.density.iter().map(|i| i.value_at(x)).sum(),
        }
    }

    // -------------------------------------------------------------- support

    /// Topological support: exact for atoms and families, density-cutoff
    /// intervals for grid parts.
    pub fn support(&self) -> SupportSet {
        let mut intervals: Vec<(f64, f64)> = self.atoms.iter().map(|&(p, _)| (p, p)).collect();
        match &self.family {
            Some(Family::Semicircle { variance }) => {
                let e = family::semicircle_edge(*variance);
                intervals.push((-e, e));
            }
            Some(Family::MarchenkoPastur { ratio, scale }) => {
                let (lo, hi) = family::mp_edges(*ratio, *scale);
                intervals.push((lo, hi));
            }
            _ => {}
        }
        for itv in &self.density {
            intervals.extend(grid_support_runs(itv));
        }
        SupportSet::new(intervals)
    }

    // ----------------------------------------------------------- transforms

    fn check_real_domain(&self, z: C64) -> Result<()> {
        if z.im != 0.0 {
            return Ok(());
        }
        let d = self.support().distance(z.re);
        if d <= SUPPORT_DISTANCE_CUTOFF {
            return Err(Error::Domain(format!(
                "z = {} is within {d:.3e} of the support",
                z.re
            )));
        }
        Ok(())
    }

    /// Cauchy-Stieltjes transform `G(z) = int d tau(t) / (z - t)`.
    pub fn cauchy_transform(&self, z: C64) -> Result<C64> {
        self.check_real_domain(z)?;
        match &self.family {
            Some(Family::Semicircle { variance }) => Ok(family::semicircle_cauchy(*variance, z)),
            Some(Family::MarchenkoPastur { ratio, scale }) => Ok(family::mp_cauchy(*ratio, *scale, z)),
            Some(Family::PointMass { a }) => Ok(1.0 / (z - *a)),
            _ => Ok(self.raw_cauchy(z)),
        }
    }

    fn raw_cauchy(&self, z: C64) -> C64 {
        let mut g = C64::new(0.0, 0.0);
        for &(p, w) in &self.atoms {
            g += w / (z - p);
        }
        for itv in &self.density {
            g += itv.integrate(&|t| 1.0 / (z - t), QUAD_TOL);
        }
        g
    }

    /// Derivative `G'(z) = -int d tau(t) / (z - t)^2`.
    pub fn cauchy_derivative(&self, z: C64) -> Result<C64> {
        self.check_real_domain(z)?;
        match &self.family {
            Some(Family::Semicircle { variance }) => Ok(family::semicircle_cauchy_derivative(*variance, z)),
            Some(Family::MarchenkoPastur { ratio, scale }) => {
                Ok(family::mp_cauchy_derivative(*ratio, *scale, z))
            }
            Some(Family::PointMass { a }) => {
                let d = z - *a;
                Ok(-1.0 / (d * d))
            }
            _ => {
                let mut g = C64::new(0.0, 0.0);
                for &(p, w) in &self.atoms {
                    let d = z - p;
                    g -= w / (d * d);
                }
                for itv in &self.density {
                    g += itv.integrate(&|t| -1.0 / ((z - t) * (z - t)), QUAD_TOL);
                }
                Ok(g)
            }
        }
    }

    /// Reciprocal transform `F(z) = 1/G(z)`.
    pub fn reciprocal_cauchy(&self, z: C64) -> Result<C64> {
        let g = self.cauchy_transform(z)?;
        if g.norm() < POLE_CUTOFF {
            return Err(Error::Pole(format!("G({z}) = {g:e}; F has a pole here")));
        }
        Ok(1.0 / g)
    }

    /// Shifted reciprocal transform `h(z) = F(z) - z`.
    pub fn h_transform(&self, z: C64) -> Result<C64> {
        Ok(self.reciprocal_cauchy(z)? - z)
    }

    /// `h'(z) = F'(z) - 1` with `F' = -G'/G^2`.
    pub fn h_derivative(&self, z: C64) -> Result<C64> {
        let g = self.cauchy_transform(z)?;
        if g.norm() < POLE_CUTOFF {
            return Err(Error::Pole(format!("G({z}) = {g:e}; F has a pole here")));
        }
        let gp = self.cauchy_derivative(z)?;
        Ok(-gp / (g * g) - 1.0)
    }

    /// R-transform `R(w) = G^{-1}(w) - 1/w`, by closed form where the family
    /// has one and otherwise by Newton inversion of `G` from the initial
    /// guess `1/w`.
    pub fn r_transform(&self, w: C64) -> Result<C64> {
        if w.norm() == 0.0 {
            return Err(Error::Domain("R-transform is evaluated at w != 0".into()));
        }
        match &self.family {
            Some(Family::Semicircle { variance }) => Ok(family::semicircle_r(*variance, w)),
            Some(Family::MarchenkoPastur { ratio, scale }) => Ok(family::mp_r(*ratio, *scale, w)),
            Some(Family::PointMass { a }) => Ok(C64::new(*a, 0.0)),
            Some(Family::BernoulliSymmetric) => Ok(family::bernoulli_r(w)),
            _ => {
                let z = self.invert_cauchy(w)?;
                Ok(z - 1.0 / w)
            }
        }
    }

    /// Derivative of the R-transform for families that carry a closed form.
    pub fn r_derivative(&self, w: C64) -> Result<C64> {
        match &self.family {
            Some(Family::Semicircle { variance }) => Ok(family::semicircle_r_derivative(*variance, w)),
            Some(Family::MarchenkoPastur { ratio, scale }) => Ok(family::mp_r_derivative(*ratio, *scale, w)),
            Some(Family::PointMass { .. }) => Ok(C64::new(0.0, 0.0)),
            _ => Err(Error::Family("no closed-form R-transform derivative for this measure".into())),
        }
    }

    /// Solve `G(z) = w` by Newton iteration started at `1/w`.
    fn invert_cauchy(&self, w: C64) -> Result<C64> {
        let mut z = 1.0 / w;
        let tol = 1e-13 + 1e-12 * w.norm();
        for _ in 0..100 {
            let g = self
                .cauchy_transform(z)
                .map_err(|e| Error::Inversion(format!("G-inversion left the domain at |w| = {}: {e}", w.norm())))?;
            let r = g - w;
            if r.norm() <= tol {
                return Ok(z);
            }
            let gp = self
                .cauchy_derivative(z)
                .map_err(|e| Error::Inversion(format!("G-inversion left the domain at |w| = {}: {e}", w.norm())))?;
            if gp.norm() < 1e-300 {
                break;
            }
            z -= r / gp;
        }
        Err(Error::Inversion(format!(
            "Newton inversion of G did not converge from 1/w within budget; convergence radius exceeded at |w| = {}",
            w.norm()
        )))
    }

    // ------------------------------------------------------------ sampling

    /// The `i/(n+1)` quantiles of the measure, `i = 1..=n`, nondecreasing and
    /// strictly inside the convex hull of the support.
    pub fn quantile_sample(&self, n: usize) -> Vec<f64> {
        assert!(n >= 1, "quantile_sample needs n >= 1");
        let result = match &self.family {
            Some(Family::Semicircle { variance }) => {
                let t = *variance;
                let e = family::semicircle_edge(t);
                (1..=n)
                    .map(|i| {
                        let q = i as f64 / (n + 1) as f64;
                        crate::roots::bisect_predicate(|x| family::semicircle_cdf(t, x) < q, -e, e, 1e-14)
                    })
                    .collect()
            }
            Some(Family::MarchenkoPastur { .. }) => {
                let grid = self.rendered(RENDER_NODES).expect("family renders onto a grid");
                grid.quantile_sample(n)
            }
            _ if self.density.is_empty() => self.atomic_quantiles(n),
            _ => self.grid_quantiles(n),
        };
        debug_assert!(result.windows(2).all(|w| w[0] <= w[1]));
        result
    }

    fn atomic_quantiles(&self, n: usize) -> Vec<f64> {
        let mut cumulative: Vec<(f64, f64)> = Vec::with_capacity(self.atoms.len());
        let mut acc = 0.0;
        for &(p, w) in &self.atoms {
            acc += w;
            cumulative.push((p, acc));
        }
        (1..=n)
            .map(|i| {
                let q = i as f64 / (n + 1) as f64;
                cumulative
                    .iter()
                    .find(|&&(_, c)| c >= q - 1e-12)
                    .map(|&(p, _)| p)
                    .unwrap_or_else(|| self.atoms.last().unwrap().0)
            })
            .collect()
    }

    fn grid_quantiles(&self, n: usize) -> Vec<f64> {
        let support = self.support();
        let (lo, hi) = support.hull();
        (1..=n)
            .map(|i| {
                let q = i as f64 / (n + 1) as f64;
                crate::roots::bisect_predicate(|x| self.cdf(x) < q, lo, hi, 1e-14)
            })
            .collect()
    }

    /// Cumulative distribution function (exact for atoms plus the
    /// piecewise-linear density; closed form / rendered for families).
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.family {
            Some(Family::Semicircle { variance }) => return family::semicircle_cdf(*variance, x),
            Some(Family::MarchenkoPastur { .. }) => {
                let grid = self.rendered(RENDER_NODES).expect("family renders onto a grid");
                return grid.cdf(x);
            }
            _ => {}
        }
        let atom_part: f64 = self.atoms.iter().filter(|&&(p, _)| p <= x).map(|&(_, w)| w).sum();
        let density_part: f64 = self.density.iter().map(|itv| itv.partial_mass(x)).sum();
        atom_part + density_part
    }

    // ----------------------------------------------------------- rendering

    /// Render a closed-form density onto a piecewise-linear grid with
    /// edge-clustered (Chebyshev) nodes, keeping atoms as atoms. The grid
    /// values are rescaled so the rendered measure has exactly unit mass.
    pub fn rendered(&self, nodes: usize) -> Result<SpectralMeasure> {
        let n = nodes.max(8);
        let make = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64, target_mass: f64| {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let xs: Vec<f64> = (0..=n)
                .map(|j| mid - half * (std::f64::consts::PI * j as f64 / n as f64).cos())
                .collect();
            let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let mut itv = DensityInterval { a: lo, b: hi, nodes: xs, values: vs };
            let mass = itv.mass();
            if mass > 0.0 {
                let scale = target_mass / mass;
                for v in &mut itv.values {
                    *v *= scale;
                }
            }
            itv
        };
        match &self.family {
            Some(Family::Semicircle { variance }) => {
                let t = *variance;
                let e = family::semicircle_edge(t);
                let itv = make(-e, e, &|x| family::semicircle_density(t, x), 1.0);
                SpectralMeasure::from_parts(vec![], vec![itv])
            }
            Some(Family::MarchenkoPastur { ratio, scale }) => {
                let (c, s) = (*ratio, *scale);
                let (lo, hi) = family::mp_edges(c, s);
                let atom_mass: f64 = self.atoms.iter().map(|a| a.1).sum();
                let itv = make(lo, hi, &|x| family::mp_density(c, s, x), 1.0 - atom_mass);
                SpectralMeasure::from_parts(self.atoms.clone(), vec![itv])
            }
            _ => {
                let mut plain = self.clone();
                plain.family = None;
                if plain.atoms.is_empty() && plain.density.is_empty() {
                    return Err(Error::Measure("nothing to render".into()));
                }
                Ok(plain)
            }
        }
    }
}

/// Sub-intervals of a grid density where the value exceeds [`DENSITY_CUTOFF`],
/// with linear interpolation of the crossing points.
fn grid_support_runs(itv: &DensityInterval) -> Vec<(f64, f64)> {
    let cut = DENSITY_CUTOFF;
    let n = itv.nodes.len();
    let mut runs = Vec::new();
    let mut start: Option<f64> = None;
    for j in 0..n {
        let above = itv.values[j] > cut;
        if above && start.is_none() {
            let x = if j == 0 {
                itv.nodes[0]
            } else {
                cross(itv.nodes[j - 1], itv.nodes[j], itv.values[j - 1], itv.values[j], cut)
            };
            start = Some(x);
        }
        if !above {
            if let Some(s) = start.take() {
                let x = cross(itv.nodes[j - 1], itv.nodes[j], itv.values[j - 1], itv.values[j], cut);
                runs.push((s, x));
            }
        }
    }
    if let Some(s) = start {
        runs.push((s, *itv.nodes.last().unwrap()));
    }
    runs
}

fn cross(x0: f64, x1: f64, v0: f64, v1: f64, cut: f64) -> f64 {
    if (v1 - v0).abs() < f64::MIN_POSITIVE {
        return x0;
    }
    x0 + (cut - v0) / (v1 - v0) * (x1 - x0)
}
