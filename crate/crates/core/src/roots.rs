//! Bracketed root refinement: bisection and safeguarded Newton.

/// A refined root together with its final residual and iteration count.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// Plain bisection on a sign-change bracket, to an `x`-width of `xtol`.
/// Returns `None` if `[a, b]` does not bracket a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Newton iteration safeguarded by a sign-change bracket: any step that
/// leaves the current bracket, or fails to shrink the residual, is replaced
/// by a bisection step. Refines until `|f| < ftol` or the budget runs out;
/// returns `None` when `[a, b]` is not a bracket.
pub fn newton_bisect<F, D>(mut f: F, mut df: D, a: f64, b: f64, ftol: f64, max_iter: u32) -> Option<Root>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() || !fhi.is_finite() || (flo != 0.0 && fhi != 0.0 && flo.signum() == fhi.signum()) {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for it in 0..max_iter {
        if fx.abs() < ftol {
            return Some(Root { x, residual: fx.abs(), iterations: it });
        }
        // maintain the bracket
        if fx != 0.0 && fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        fx = f(x);
        if hi - lo < f64::EPSILON * (1.0 + x.abs()) {
            // bracket exhausted at floating-point resolution
            return Some(Root { x, residual: fx.abs(), iterations: it });
        }
    }
    if fx.abs() < ftol {
        return Some(Root { x, residual: fx.abs(), iterations: max_iter });
    }
    None
}

/// Refine the switch point of a monotone boolean predicate by bisection.
/// `a` must satisfy the predicate and `b` must not; the returned point is
/// within `xtol` of the true boundary.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut p: P, a: f64, b: f64, xtol: f64) -> f64 {
    let (mut inside, mut outside) = (a, b);
    for _ in 0..200 {
        if (outside - inside).abs() <= xtol {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if p(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}
