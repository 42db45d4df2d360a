use super::*;
use crate::measure::SpectralMeasure;
use crate::outlier::SpikeSet;
use rand::RngExt;
use rand_distr::StandardNormal;

#[test]
fn empty_spikes_zero_measures_give_zero_matrix() {
    let pm = SpectralMeasure::point_mass(0.0);
    let mut inst = build_model(&pm, &pm, &SpikeSet::empty(), 12, 1).unwrap();
    let eigs = inst.ensure_eigenvalues().unwrap();
    assert!(eigs.iter().all(|&e| e.abs() < 1e-12));
}

#[test]
fn point_mass_nu_shifts_the_diagonal_exactly() {
    let mu = SpectralMeasure::semicircle(0.25).unwrap();
    let nu = SpectralMeasure::point_mass(0.75);
    let spikes = SpikeSet::new(vec![(2.0, 1)], &mu).unwrap();
    let mut inst = build_model(&mu, &nu, &spikes, 30, 7).unwrap();
    let mut expect: Vec<f64> = inst.a_diag.iter().map(|a| a + 0.75).collect();
    expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let eigs = inst.ensure_eigenvalues().unwrap();
    for (e, x) in eigs.iter().zip(&expect) {
        assert!((e - x).abs() < 1e-9, "{e} vs {x}");
    }
}

#[test]
fn finite_rank_outlier_appears_near_prediction() {
    // Theorem 1.1 regime at moderate size: spike 2 over a semicircle bulk
    let mu = SpectralMeasure::point_mass(0.0);
    let nu = SpectralMeasure::semicircle(1.0).unwrap();
    let spikes = SpikeSet::new(vec![(2.0, 1)], &mu).unwrap();
    let mut inst = build_model(&mu, &nu, &spikes, 1000, 20260614).unwrap();
    let eigs = inst.ensure_eigenvalues().unwrap();
    assert!((eigs[0] - 2.5).abs() < 0.1, "largest eigenvalue {}", eigs[0]);
    // the rest of the spectrum hugs [-2, 2]
    assert!(eigs[1] < 2.1 && *eigs.last().unwrap() > -2.1);
}

#[test]
fn model_building_validates_rank() {
    let mu = SpectralMeasure::point_mass(0.0);
    let spikes = SpikeSet::new(vec![(2.0, 5)], &mu).unwrap();
    assert!(matches!(build_model(&mu, &mu, &spikes, 5, 0), Err(Error::Size(_))));
    assert!(build_model(&mu, &mu, &spikes, 6, 0).is_ok());
}

#[test]
fn identical_seeds_reproduce_instances() {
    let mu = SpectralMeasure::semicircle(1.0).unwrap();
    let nu = SpectralMeasure::bernoulli_symmetric();
    let spikes = SpikeSet::new(vec![(3.0, 1)], &mu).unwrap();
    let a = build_model(&mu, &nu, &spikes, 24, 5).unwrap();
    let b = build_model(&mu, &nu, &spikes, 24, 5).unwrap();
    assert_eq!(a.a_diag, b.a_diag);
    assert_eq!(a.b_diag, b.b_diag);
    assert_eq!(a.sample_unitary(), b.sample_unitary());
}

#[test]
fn trace_conservation() {
    let mu = SpectralMeasure::semicircle(0.5).unwrap();
    let nu = SpectralMeasure::marchenko_pastur(0.5, 1.0).unwrap();
    let spikes = SpikeSet::new(vec![(3.0, 2)], &mu).unwrap();
    let n = 300;
    let mut inst = build_model(&mu, &nu, &spikes, n, 9).unwrap();
    let expect: f64 = inst.a_diag.iter().sum::<f64>() + inst.b_diag.iter().sum::<f64>();
    let eigs = inst.ensure_eigenvalues().unwrap();
    let got: f64 = eigs.iter().sum();
    assert!((got - expect).abs() < 1e-8 * n as f64);
}

// ------------------------------------------------------ brute-force oracle

/// Characteristic polynomial coefficients by Faddeev-LeVerrier (monic,
/// ascending powers). Real for Hermitian input.
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

/// All-real roots of the characteristic polynomial by dense scan plus
/// bisection inside a Gershgorin bound; independent of the QL path.
pub(super) fn charpoly_eigenvalues_oracle(h: &CMatrix) -> Vec<f64> {
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
            let r = crate::roots::bisect(|x| horner(&coeffs, x), x0, x1, 1e-13).unwrap();
            roots.push(r);
        }
        x0 = x1;
        f0 = f1;
    }
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}

pub(super) fn random_hermitian(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h.set(i, i, C64::new(rng.sample::<f64, _>(StandardNormal), 0.0));
        for j in i + 1..n {
            let v = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            h.set(i, j, v);
            h.set(j, i, v.conj());
        }
    }
    h
}

#[test]
fn eigensolver_matches_charpoly_oracle() {
    let mut rng = stream_rng(123, 0);
    for trial in 0..25 {
        let h = random_hermitian(5, &mut rng);
        let fast = hermitian_eigenvalues(&h).unwrap();
        let oracle = charpoly_eigenvalues_oracle(&h);
        assert_eq!(oracle.len(), 5, "oracle lost a root in trial {trial}");
        for (a, b) in fast.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "trial {trial}: {a} vs {b}");
        }
    }
}

// --------------------------------------------------------------- det(M_N)

#[test]
fn det_m_of_rank_zero_is_one() {
    let pm = SpectralMeasure::point_mass(0.0);
    let inst = build_model(&pm, &pm, &SpikeSet::empty(), 8, 0).unwrap();
    let d = det_m_diagnostic(&inst, &SpikeSet::empty(), 0.0, 5.0).unwrap();
    assert_eq!(d, C64::new(1.0, 0.0));
}

#[test]
fn det_m_vanishes_at_empirical_outliers() {
    let mu = SpectralMeasure::semicircle(0.25).unwrap();
    let nu = SpectralMeasure::bernoulli_symmetric();
    let spikes = SpikeSet::new(vec![(3.0, 1)], &mu).unwrap();
    let n = 300;
    let mut inst = build_model(&mu, &nu, &spikes, n, 31).unwrap();
    let top = inst.ensure_eigenvalues().unwrap()[0];
    assert!(top > 2.0, "expected a detached eigenvalue, got {top}");
    // alpha at a density point of mu (the center of the semicircle)
    let d_at_outlier = det_m_diagnostic(&inst, &spikes, 0.0, top).unwrap();
    assert!(d_at_outlier.norm() < 1e-8, "|det| = {:e}", d_at_outlier.norm());
    let d_away = det_m_diagnostic(&inst, &spikes, 0.0, top + 0.7).unwrap();
    assert!(d_away.norm() > 1e-2, "|det| = {:e}", d_away.norm());
}

#[test]
fn det_m_rejects_mismatched_instance() {
    let mu = SpectralMeasure::semicircle(0.25).unwrap();
    let nu = SpectralMeasure::bernoulli_symmetric();
    let spikes = SpikeSet::new(vec![(3.0, 1)], &mu).unwrap();
    let other = SpikeSet::new(vec![(4.0, 1)], &mu).unwrap();
    let inst = build_model(&mu, &nu, &spikes, 50, 2).unwrap();
    assert!(matches!(
        det_m_diagnostic(&inst, &other, 0.0, 5.0),
        Err(Error::Config(_))
    ));
}

// ----------------------------------------------------------- verification

#[test]
fn verification_flags_window_overlap() {
    let mu = SpectralMeasure::point_mass(0.0);
    let nu = SpectralMeasure::semicircle(1.0).unwrap();
    let spikes = SpikeSet::new(vec![(2.0, 1)], &mu).unwrap();
    let preds = crate::outlier::outliers_point_mass(&nu, &[(2.0, 1)]).unwrap();
    // epsilon too large: the window reaches the support [-2, 2] from 2.5
    let res = run_verification(&mu, &nu, &spikes, &preds, 50, 1, 0.6, 0.05, 1);
    assert!(matches!(res, Err(Error::Config(_))));
}

#[test]
fn small_scale_verification_passes() {
    let mu = SpectralMeasure::point_mass(0.0);
    let nu = SpectralMeasure::semicircle(1.0).unwrap();
    let spikes = SpikeSet::new(vec![(2.0, 1)], &mu).unwrap();
    let preds = crate::outlier::outliers_point_mass(&nu, &[(2.0, 1)]).unwrap();
    let report = run_verification(&mu, &nu, &spikes, &preds, 400, 3, 0.2, 0.2, 77).unwrap();
    assert_eq!(report.predictions.len(), 1);
    assert_eq!(report.predictions[0].expected, 1);
    assert!(report.pass_fraction >= 2.0 / 3.0, "report: {report:?}");
    // CSV has one row per prediction per trial plus the header
    assert_eq!(report.to_csv().lines().count(), 1 + 3);
}

#[test]
fn empty_prediction_run_counts_strays_only() {
    let mu = SpectralMeasure::semicircle(1.0).unwrap();
    let nu = SpectralMeasure::semicircle(1.0).unwrap();
    let report =
        run_verification(&mu, &nu, &SpikeSet::empty(), &[], 200, 2, 0.1, 0.4, 5).unwrap();
    assert!(report.strays.is_empty(), "strays: {:?}", report.strays);
    assert_eq!(report.pass_fraction, 1.0);
}
