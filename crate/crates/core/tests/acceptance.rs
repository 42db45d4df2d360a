//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

use std::time::Instant;

use freeconv::measure::SpectralMeasure;
use freeconv::outlier::{self, SpikeSet};
use freeconv::rmt::{self, CMatrix};
use freeconv::subordination::{self, DEFAULT_LADDER};
use freeconv::C64;

fn pass(criterion: u32, what: &str, started: Instant) {
    println!(
        "criterion {criterion} [PASS] {what} ({:.2} s)",
        started.elapsed().as_secs_f64()
    );
}

/// Closed-form roots of the Bernoulli ⊞ semicircle spike equation.
fn example_roots(theta: f64, t: f64) -> (f64, f64) {
    let s = (theta * theta - 4.0 * t).sqrt();
    let disc = (2.0 * theta * theta + 2.0 * theta * s + 16.0 - 4.0 * t).sqrt();
    ((3.0 * theta - s - disc) / 4.0, (3.0 * theta - s + disc) / 4.0)
}

fn example_fixture() -> (SpectralMeasure, SpectralMeasure, SpikeSet) {
    let mu = SpectralMeasure::semicircle(0.25).unwrap();
    let nu = SpectralMeasure::bernoulli_symmetric();
    let spikes = SpikeSet::new(vec![(3.0, 1)], &mu).unwrap();
    (mu, nu, spikes)
}

// --------------------------------------------------------------------------
// 1. Bernoulli ⊞ semicircle outliers at theta = 3, t = 1/4
// --------------------------------------------------------------------------
#[test]
fn criterion_1_bernoulli_semicircle_example() {
    let started = Instant::now();
    let (mu, nu, spikes) = example_fixture();
    let support = subordination::convolution_support(&mu, &nu);
    let (window, step) = outlier::default_window(&support);
    let preds = outlier::solve_outliers(&mu, &nu, &spikes, window, step).unwrap();

    assert_eq!(preds.len(), 2, "expected exactly two predictions, got {preds:?}");
    let (lo, hi) = example_roots(3.0, 0.25);
    assert!((preds[0].rho - lo).abs() < 1e-6, "{} vs {lo}", preds[0].rho);
    assert!((preds[1].rho - hi).abs() < 1e-6, "{} vs {hi}", preds[1].rho);
    // spot values as printed in the source material
    assert!((preds[0].rho + 0.224353).abs() < 1e-6);
    assert!((preds[1].rho - 3.310140).abs() < 1e-6);

    let hp = 3.0 / (2.0 * 8.0_f64.sqrt()) - 0.5;
    let dp_hi = hp * (hi - 3.0) * (hi - 3.0);
    let dp_lo = hp * (lo - 3.0) * (lo - 3.0);
    assert!((preds[1].derivative_product - dp_hi).abs() < 1e-8);
    assert!((preds[0].derivative_product - dp_lo).abs() < 1e-8);
    assert!((preds[1].derivative_product - 0.00292).abs() < 1e-5);
    assert!((preds[0].derivative_product - 0.3153).abs() < 1e-4);
    for p in &preds {
        assert!(p.derivative_product > 0.0 && p.derivative_product < 1.0);
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion 1 took {elapsed:.2} s (limit 5 s)");
    pass(1, "two admissible roots at -0.224353 and 3.310140", started);
}

// --------------------------------------------------------------------------
// 2. finite-rank thresholds and the infinitely-divisible route
// --------------------------------------------------------------------------
#[test]
fn criterion_2_finite_rank_reproduction() {
    let started = Instant::now();
    let mu = SpectralMeasure::point_mass(0.0);
    let nu = SpectralMeasure::semicircle(1.0).unwrap();

    // gamma = 2 detaches at G^{-1}(1/2) = 2.5
    let up = outlier::outliers_point_mass(&nu, &[(2.0, 1)]).unwrap();
    assert_eq!(up.len(), 1);
    assert!((up[0].rho - 2.5).abs() < 1e-8, "rho = {}", up[0].rho);
    // gamma = 0.9 stays below the threshold 1/lim G = 1
    assert!(outlier::outliers_point_mass(&nu, &[(0.9, 1)]).unwrap().is_empty());

    // the H(z) = z + R_nu(G_mu(z)) route agrees with the general solver
    let infdiv = outlier::outliers_infdiv(&mu, &nu, 2.0).unwrap().expect("above threshold");
    assert!((infdiv - up[0].rho).abs() < 1e-8);
    assert!(outlier::outliers_infdiv(&mu, &nu, 0.9).unwrap().is_none());
    // and through solve_outliers (which dispatches the point-mass bulk)
    let spikes = SpikeSet::new(vec![(2.0, 1)], &mu).unwrap();
    let general = outlier::solve_outliers(&mu, &nu, &spikes, (-8.0, 8.0), 0.002).unwrap();
    assert_eq!(general.len(), 1);
    assert!((general[0].rho - infdiv).abs() < 1e-8);

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion 2 took {elapsed:.2} s (limit 5 s)");
    pass(2, "rho = 2.5 above threshold, none at gamma = 0.9, routes agree to 1e-8", started);
}

// --------------------------------------------------------------------------
// 3. subordination identities on a 100-point grid for three pairs
// --------------------------------------------------------------------------
#[test]
fn criterion_3_subordination_identity_suite() {
    let started = Instant::now();
    let pairs: Vec<(SpectralMeasure, SpectralMeasure, &str)> = vec![
        (
            SpectralMeasure::semicircle(1.0).unwrap(),
            SpectralMeasure::semicircle(1.0).unwrap(),
            "semicircle/semicircle",
        ),
        (
            SpectralMeasure::semicircle(0.25).unwrap(),
            SpectralMeasure::bernoulli_symmetric(),
            "semicircle/Bernoulli",
        ),
        (
            SpectralMeasure::marchenko_pastur(0.5, 1.0).unwrap(),
            SpectralMeasure::from_atoms(vec![(-1.0, 0.3), (0.2, 0.45), (1.4, 0.25)]).unwrap(),
            "Marchenko-Pastur/atomic",
        ),
    ];
    for (mu, nu, label) in &pairs {
        let mut checked = 0;
        for i in 0..10 {
            let re = -3.0 + 6.0 * i as f64 / 9.0;
            for j in 0..10 {
                let im = 0.05 * (2.0f64 / 0.05).powf(j as f64 / 9.0);
                let z = C64::new(re, im);
                let sp = subordination::denjoy_wolff(mu, nu, z).unwrap();
                let g1 = mu.cauchy_transform(sp.omega1).unwrap();
                let g2 = nu.cauchy_transform(sp.omega2).unwrap();
                assert!(
                    (g1 - g2).norm() < 1e-9,
                    "{label}: |G_mu(w1) - G_nu(w2)| = {:e} at {z}",
                    (g1 - g2).norm()
                );
                let eq31_mu = sp.omega1 + sp.omega2 - z - 1.0 / g1;
                let eq31_nu = sp.omega1 + sp.omega2 - z - 1.0 / g2;
                assert!(eq31_mu.norm() < 1e-8, "{label}: Eq.(3.1) via mu = {:e}", eq31_mu.norm());
                assert!(eq31_nu.norm() < 1e-8, "{label}: Eq.(3.1) via nu = {:e}", eq31_nu.norm());
                assert!(
                    sp.derivative_product.norm() < 1.0,
                    "{label}: |h'h'| = {} at {z}",
                    sp.derivative_product.norm()
                );
                checked += 1;
            }
        }
        assert_eq!(checked, 100);
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "criterion 3 took {elapsed:.2} s (limit 30 s)");
    pass(3, "identities hold at 100 points for all three pairs", started);
}

// --------------------------------------------------------------------------
// 4. semicircle ⊞ semicircle against the variance-2 closed form
// --------------------------------------------------------------------------
#[test]
fn criterion_4_closed_form_convolution_oracle() {
    let started = Instant::now();
    let mu = SpectralMeasure::semicircle(1.0).unwrap();
    let edge = 2.0 * 2.0f64.sqrt();
    let grid: Vec<f64> = (0..200).map(|j| -3.0 + 6.0 * j as f64 / 199.0).collect();
    let profile = subordination::convolution_density(&mu, &mu, &grid, &DEFAULT_LADDER).unwrap();
    assert!(profile.failed.is_empty(), "unconverged points: {:?}", profile.failed);
    let mut worst = 0.0f64;
    for &(x, d) in &profile.points {
        let closed = if x.abs() >= edge {
            0.0
        } else {
            (8.0 - x * x).sqrt() / (4.0 * std::f64::consts::PI)
        };
        worst = worst.max((d - closed).abs());
    }
    assert!(worst < 1e-3, "max density error {worst:e}");

    let support = subordination::convolution_support(&mu, &mu);
    assert_eq!(support.intervals().len(), 1);
    let (lo, hi) = support.hull();
    assert!((lo + edge).abs() < 1e-3 && (hi - edge).abs() < 1e-3, "edges [{lo}, {hi}]");
    pass(4, "density within 1e-3 of the variance-2 form, edges at ±2√2 ± 1e-3", started);
}

// --------------------------------------------------------------------------
// 5. Monte Carlo verification at N = 2000 (desk-scale main theorem)
// --------------------------------------------------------------------------
#[test]
fn criterion_5_monte_carlo_verification() {
    let started = Instant::now();

    // Example fixture: both windows hold exactly one eigenvalue, no strays
    let (mu, nu, spikes) = example_fixture();
    let support = subordination::convolution_support(&mu, &nu);
    let (window, step) = outlier::default_window(&support);
    let preds = outlier::solve_outliers(&mu, &nu, &spikes, window, step).unwrap();
    assert_eq!(preds.len(), 2);
    let report =
        rmt::run_verification(&mu, &nu, &spikes, &preds, 2000, 10, 0.1, 0.1, 20260801).unwrap();
    assert!(
        report.pass_fraction >= 0.9,
        "Example fixture pass fraction {} (strays {:?})",
        report.pass_fraction,
        report.strays
    );

    // finite-rank fixture: exactly one eigenvalue in (2.4, 2.6)
    let mu0 = SpectralMeasure::point_mass(0.0);
    let sc = SpectralMeasure::semicircle(1.0).unwrap();
    let spikes0 = SpikeSet::new(vec![(2.0, 1)], &mu0).unwrap();
    let preds0 = outlier::outliers_point_mass(&sc, &[(2.0, 1)]).unwrap();
    let report0 =
        rmt::run_verification(&mu0, &sc, &spikes0, &preds0, 2000, 10, 0.1, 0.1, 20260802).unwrap();
    let window_hits = &report0.predictions[0];
    assert!((window_hits.rho - 2.5).abs() < 1e-8);
    assert!(
        window_hits.pass_fraction >= 0.9,
        "window (2.4, 2.6) fraction {}",
        window_hits.pass_fraction
    );
    assert!(report0.pass_fraction >= 0.9, "finite-rank pass fraction {}", report0.pass_fraction);

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "criterion 5 took {elapsed:.1} s (limit 600 s)");
    pass(5, "both fixtures pass in >= 9/10 trials at N = 2000", started);
}

// --------------------------------------------------------------------------
// 6. det(M_N) diagnostic on one Example instance at N = 1000
// --------------------------------------------------------------------------
#[test]
fn criterion_6_det_m_diagnostic() {
    let started = Instant::now();
    let (mu, nu, spikes) = example_fixture();
    let support = subordination::convolution_support(&mu, &nu);
    let (window, step) = outlier::default_window(&support);
    let preds = outlier::solve_outliers(&mu, &nu, &spikes, window, step).unwrap();
    let k_eta = support.enlarge(0.1);

    let mut inst = rmt::build_model(&mu, &nu, &spikes, 1000, 77).unwrap();
    let eigs = inst.ensure_eigenvalues().unwrap().to_vec();
    // empirical outliers: the eigenvalues in the prediction windows
    let outliers: Vec<f64> = preds
        .iter()
        .map(|p| {
            let hits: Vec<f64> =
                eigs.iter().copied().filter(|&e| (e - p.rho).abs() < 0.1).collect();
            assert_eq!(hits.len(), 1, "window at {} holds {:?}", p.rho, hits);
            hits[0]
        })
        .collect();

    let alpha = rmt::default_alpha(&mu);
    assert!(alpha.abs() < 1e-12); // median of the semicircle
    for &lambda in &outliers {
        let det = rmt::det_m_diagnostic(&inst, &spikes, alpha, lambda).unwrap();
        assert!(det.norm() < 1e-4, "|det M({lambda})| = {:e}", det.norm());
    }
    // away from the outliers (and outside K_eta) the determinant stays big
    for &lambda in &[-2.2, 2.45, 4.31] {
        assert!(!k_eta.contains(lambda));
        assert!(outliers.iter().all(|&o| (o - lambda).abs() >= 0.5));
        let det = rmt::det_m_diagnostic(&inst, &spikes, alpha, lambda).unwrap();
        assert!(det.norm() >= 1e-2, "|det M({lambda})| = {:e}", det.norm());
    }
    // Proposition-5.1 clustering: the corner resolvent approaches
    // 1/(omega(rho_1) - alpha) = 1/3 at the top outlier
    let corner = rmt::resolvent_corner(&inst, &spikes, alpha, outliers[1]).unwrap();
    let limit = 1.0 / (3.0 - alpha);
    assert!(
        (corner.get(0, 0) - C64::new(limit, 0.0)).norm() < 0.12,
        "corner {} vs {limit}",
        corner.get(0, 0)
    );
    pass(6, "det vanishes at empirical outliers, stays >= 1e-2 half a unit away", started);
}

// --------------------------------------------------------------------------
// 7. property suites: measure invariants and the eigensolver oracle
// --------------------------------------------------------------------------

mod charpoly_oracle {
    use super::*;

    /// Characteristic polynomial coefficients by Faddeev-LeVerrier.
    fn charpoly(h: &CMatrix) -> Vec<f64> {
        let n = h.n_rows();
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let mut mk = h.clone();
        for k in 1..=n {
            let c = -mk.trace().re / k as f64;
            coeffs[n - k] = c;
            if k < n {
                let mut shifted = mk.clone();
                shifted.add_diag(&vec![c; n]);
                mk = h.mul(&shifted);
            }
        }
        coeffs
    }

    fn horner(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Real roots by scan plus bisection inside a Gershgorin bound.
    pub fn eigenvalues(h: &CMatrix) -> Vec<f64> {
        let n = h.n_rows();
        let coeffs = charpoly(h);
        let radius: f64 = (0..n)
            .map(|i| (0..n).map(|j| h.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
            .max(1e-6);
        let samples = 40_000;
        let step = 2.0 * radius / samples as f64;
        let mut roots = Vec::with_capacity(n);
        let mut x0 = -radius;
        let mut f0 = horner(&coeffs, x0);
        for j in 1..=samples {
            let x1 = -radius + j as f64 * step;
            let f1 = horner(&coeffs, x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0.signum() != f1.signum() {
                roots.push(freeconv::roots::bisect(|x| horner(&coeffs, x), x0, x1, 1e-13).unwrap());
            }
            x0 = x1;
            f0 = f1;
        }
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots
    }
}

#[test]
fn criterion_7_property_suites() {
    use rand::RngExt;
    use rand_distr::StandardNormal;

    let started = Instant::now();
    let families: Vec<(SpectralMeasure, &str)> = vec![
        (SpectralMeasure::semicircle(0.7).unwrap(), "semicircle"),
        (SpectralMeasure::marchenko_pastur(0.5, 1.0).unwrap(), "marchenko_pastur"),
        (SpectralMeasure::point_mass(-0.3), "point_mass"),
        (SpectralMeasure::bernoulli_symmetric(), "bernoulli_symmetric"),
        (SpectralMeasure::empirical(&[-1.1, -0.2, 0.3, 0.9, 1.7]).unwrap(), "empirical"),
    ];
    let mut rng = rmt::stream_rng(20260803, 0);
    for (m, label) in &families {
        let support = m.support();
        let (lo, hi) = support.hull();
        let r = lo.abs().max(hi.abs()).max(1.0);

        // mass recovery high on the imaginary axis
        let y = 1e6 * r;
        let g = m.cauchy_transform(C64::new(0.0, y)).unwrap();
        assert!((C64::new(0.0, y) * g - 1.0).norm() < 1e-6, "{label}: mass recovery");

        for k in 0..100 {
            // conjugate symmetry and half-plane mapping at random points
            let z = C64::new(
                4.0 * r * (rng.sample::<f64, _>(StandardNormal) as f64),
                0.05 + 3.0 * (rng.sample::<f64, _>(StandardNormal) as f64).abs(),
            );
            let g1 = m.cauchy_transform(z).unwrap();
            let g2 = m.cauchy_transform(z.conj()).unwrap();
            assert!(g1.im < 0.0, "{label}: Im G >= 0 at {z}");
            assert!((g1.conj() - g2).norm() < 1e-12, "{label}: conjugate symmetry at {z}");

            // R-transform round trip on the |w| = 0.05 circle
            let angle = k as f64 * std::f64::consts::TAU / 100.0;
            let w = C64::new(0.05 * angle.cos(), 0.05 * angle.sin());
            let z_inv = m.r_transform(w).unwrap() + 1.0 / w;
            let g_round = m.cauchy_transform(z_inv).unwrap();
            assert!((g_round - w).norm() < 1e-10, "{label}: R round trip at {w}");

            // h' against central differences at random points outside the
            // support (above and below alternately)
            let offset = 0.05 + 3.0 * rng.sample::<f64, _>(StandardNormal).abs();
            let x = if k % 2 == 0 { hi + offset } else { lo - offset };
            let step = 1e-6 * x.abs().max(1.0);
            let hp = m.h_derivative(C64::new(x, 0.0)).unwrap();
            let fd = (m.h_transform(C64::new(x + step, 0.0)).unwrap()
                - m.h_transform(C64::new(x - step, 0.0)).unwrap())
                / (2.0 * step);
            assert!(
                (hp - fd).norm() / hp.norm().max(1e-12) < 1e-6,
                "{label}: h' vs finite differences at {x}"
            );
        }
    }

    // eigensolver against the brute-force characteristic-polynomial oracle
    let mut rng = rmt::stream_rng(20260804, 0);
    for trial in 0..100 {
        let mut h = CMatrix::zeros(5, 5);
        for i in 0..5 {
            h.set(i, i, C64::new(rng.sample::<f64, _>(StandardNormal), 0.0));
            for j in i + 1..5 {
                let v = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                h.set(i, j, v);
                h.set(j, i, v.conj());
            }
        }
        let fast = rmt::hermitian_eigenvalues(&h).unwrap();
        let oracle = charpoly_oracle::eigenvalues(&h);
        assert_eq!(oracle.len(), 5, "oracle lost a root in trial {trial}");
        for (a, b) in fast.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "trial {trial}: {a} vs {b}");
        }
    }
    pass(7, "measure invariants (5 families x 100 points) and 100 eigensolver oracles", started);
}
