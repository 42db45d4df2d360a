//! Statistical invariants of the sampler at realistic sizes: bulk
//! convergence to the free convolution and unitary invariance in law.

use freeconv::measure::SpectralMeasure;
use freeconv::outlier::SpikeSet;
use freeconv::rmt;
use freeconv::subordination::{self, DEFAULT_LADDER};

/// One-sample Kolmogorov-Smirnov distance between sorted data and a CDF
/// given as interpolation nodes.
fn ks_against_cdf(sorted: &[f64], grid: &[f64], cdf: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let target = interp(grid, cdf, x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        worst = worst.max((target - lo).abs()).max((target - hi).abs());
    }
    worst
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= *xs.last().unwrap() {
        return *ys.last().unwrap();
    }
    let j = xs.partition_point(|&v| v < x).max(1);
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    ys[j - 1] * (1.0 - t) + ys[j] * t
}

#[test]
fn bulk_converges_to_free_convolution() {
    // spike-free Example pair at N = 2000: the empirical spectral measure
    // is close to the integrated convolution density
    let mu = SpectralMeasure::semicircle(0.25).unwrap();
    let nu = SpectralMeasure::bernoulli_symmetric();
    let support = subordination::convolution_support(&mu, &nu);
    let (lo, hi) = support.hull();
    let pad = 0.1 * support.diameter();
    let grid: Vec<f64> = (0..=800)
        .map(|j| lo - pad + (hi - lo + 2.0 * pad) * j as f64 / 800.0)
        .collect();
    let profile = subordination::convolution_density(&mu, &nu, &grid, &DEFAULT_LADDER).unwrap();
    assert!(profile.failed.is_empty());

    // density integrates to one
    let total = profile.integral();
    assert!((total - 1.0).abs() < 5e-3, "density integral {total}");

    // cumulative trapezoid CDF
    let mut cdf = vec![0.0];
    for w in profile.points.windows(2) {
        let inc = 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
        cdf.push(cdf.last().unwrap() + inc);
    }
    let xs: Vec<f64> = profile.points.iter().map(|p| p.0).collect();
    let scale = *cdf.last().unwrap();
    let cdf: Vec<f64> = cdf.iter().map(|c| c / scale).collect();

    let mut inst = rmt::build_model(&mu, &nu, &SpikeSet::empty(), 2000, 4242).unwrap();
    let mut eigs = inst.ensure_eigenvalues().unwrap().to_vec();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ks = ks_against_cdf(&eigs, &xs, &cdf);
    assert!(ks < 0.05, "KS distance {ks}");
}

#[test]
fn spectra_are_invariant_in_law_under_seed_change() {
    // two independent draws at N = 1000 have close bulk distributions
    let mu = SpectralMeasure::semicircle(1.0).unwrap();
    let nu = SpectralMeasure::marchenko_pastur(0.5, 1.0).unwrap();
    let draw = |seed: u64| {
        let mut inst = rmt::build_model(&mu, &nu, &SpikeSet::empty(), 1000, seed).unwrap();
        let mut eigs = inst.ensure_eigenvalues().unwrap().to_vec();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs
    };
    let a = draw(1);
    let b = draw(2);
    // two-sample KS distance
    let (mut i, mut j) = (0usize, 0usize);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let mut worst = 0.0f64;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        worst = worst.max((i as f64 / n - j as f64 / m).abs());
    }
    assert!(worst < 0.05, "two-sample KS {worst}");
}
