//! The deformed random matrix harness: sample `X = A + U^* B U` with `U`
//! Haar unitary, extract its spectrum, and verify outlier predictions by
//! Monte Carlo counting, including the `det(M_N)` diagnostic whose zeros
//! outside the enlarged support are exactly the outlier eigenvalues.

mod cmatrix;
mod eigen;
mod haar;

pub use cmatrix::{determinant, CMatrix};
pub use eigen::hermitian_eigenvalues;
pub use haar::{haar_unitary, haar_unitary_from_rng, stream_rng};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{SpectralMeasure, SupportSet};
use crate::outlier::{OutlierPrediction, SpikeSet};
use crate::subordination::convolution_support;
use crate::C64;

/// One sampled model: diagonal data plus the seed that regenerates its
/// Haar unitary (stream 0 of the seeded generator).
#[derive(Debug, Clone, Serialize)]
pub struct ModelInstance {
    pub n: usize,
    /// Spikes (with multiplicity) in the first `r` slots, then bulk
    /// quantiles of `mu`.
    pub a_diag: Vec<f64>,
    /// Quantiles of `nu`.
    pub b_diag: Vec<f64>,
    pub seed: u64,
    /// Sorted nonincreasing, once computed.
    pub eigenvalues: Option<Vec<f64>>,
}

/// `diag(a) + U^H diag(b) U`, symmetrized against roundoff.
fn deformed_matrix(u: &CMatrix, a_diag: &[f64], b_diag: &[f64]) -> CMatrix {
    let bu = u.scale_rows(b_diag);
    let mut x = u.conj_transpose().mul(&bu);
    x.add_diag(a_diag);
    x.hermitize();
    x
}

/// Build a model instance: `a_diag` carries the spikes (decreasing, with
/// multiplicity) followed by the `n - r` bulk quantiles of `mu`; `b_diag`
/// carries the `n` quantiles of `nu`.
pub fn build_model(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    spikes: &SpikeSet,
    n: usize,
    seed: u64,
) -> Result<ModelInstance> {
    let r = spikes.rank();
    if n <= r {
        return Err(Error::Size(format!("need n > r, got n = {n} with rank {r}")));
    }
    let mut a_diag = Vec::with_capacity(n);
    for s in spikes.spikes() {
        a_diag.extend(std::iter::repeat(s.theta).take(s.multiplicity));
    }
    a_diag.extend(mu.quantile_sample(n - r));
    let b_diag = nu.quantile_sample(n);
    Ok(ModelInstance { n, a_diag, b_diag, seed, eigenvalues: None })
}

impl ModelInstance {
    /// The Haar unitary of this instance (deterministic in the seed).
    pub fn sample_unitary(&self) -> CMatrix {
        haar_unitary(self.n, self.seed)
    }

    /// Form `X = diag(a) + U^H diag(b) U`.
    pub fn form_matrix(&self) -> CMatrix {
        deformed_matrix(&self.sample_unitary(), &self.a_diag, &self.b_diag)
    }

    /// Compute (and cache) the spectrum.
    pub fn ensure_eigenvalues(&mut self) -> Result<&[f64]> {
        if self.eigenvalues.is_none() {
            let x = self.form_matrix();
            self.eigenvalues = Some(hermitian_eigenvalues(&x)?);
        }
        Ok(self.eigenvalues.as_deref().unwrap())
    }
}

// ------------------------------------------------------------- verification

/// Default `eta` surrogate for the vanishing-neighborhood sequence:
/// `4 N^(-1/3)` times the support diameter.
pub fn default_eta(n: usize, support: &SupportSet) -> f64 {
    4.0 * (n as f64).powf(-1.0 / 3.0) * support.diameter().max(1e-3)
}

/// Default `alpha` for the resolvent diagnostic: the median of `mu`, which
/// is a density point for absolutely continuous bulks and an atom otherwise;
/// either way `lim_{y -> 0} G_mu(alpha + iy)` lands in `R + i [-inf, 0)` as
/// the diagnostic requires.
pub fn default_alpha(mu: &SpectralMeasure) -> f64 {
    mu.quantile_sample(1)[0]
}

/// Per-prediction verification row.
#[derive(Debug, Clone, Serialize)]
pub struct PredictionOutcome {
    pub rho: f64,
    pub epsilon: f64,
    pub expected: usize,
    /// Eigenvalue count in `(rho - eps, rho + eps)`, one entry per trial.
    pub observed: Vec<usize>,
    pub pass_fraction: f64,
}

/// An eigenvalue outside the enlarged support not covered by any window.
#[derive(Debug, Clone, Serialize)]
pub struct StrayEigenvalue {
    pub trial: usize,
    pub value: f64,
}

/// Monte Carlo verdict over all trials.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub n: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub seed: u64,
    pub predictions: Vec<PredictionOutcome>,
    pub strays: Vec<StrayEigenvalue>,
    /// Per trial: every window held exactly its multiplicity and no strays.
    pub trial_pass: Vec<bool>,
    pub pass_fraction: f64,
}

impl SimulationReport {
    /// CSV rows `trial,rho,epsilon,expected,observed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,rho,epsilon,expected,observed\n");
        for t in 0..self.trials {
            for p in &self.predictions {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    t, p.rho, p.epsilon, p.expected, p.observed[t]
                ));
            }
        }
        out
    }

    /// JSON-compatible summary; `config_echo` is embedded verbatim.
    pub fn summary_json(&self, config_echo: serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "trials": self.trials,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "seed": self.seed,
            "pass_fraction": self.pass_fraction,
            "trial_pass": self.trial_pass,
            "strays": self.strays,
            "predictions": self.predictions,
            "config": config_echo,
        })
    }
}

/// Sample `trials` independent instances (ChaCha streams `1..=trials` of
/// `seed`) and count eigenvalues in the prediction windows `(rho - eps,
/// rho + eps)`; eigenvalues outside the `eta`-enlarged support covered by
/// no window are strays. A trial passes when every window holds exactly its
/// multiplicity and there are no strays.
#[allow(clippy::too_many_arguments)]
pub fn run_verification(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    spikes: &SpikeSet,
    predictions: &[OutlierPrediction],
    n: usize,
    trials: usize,
    epsilon: f64,
    eta: f64,
    seed: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    if !(epsilon > 0.0) || !(eta >= 0.0) {
        return Err(Error::Config(format!("need epsilon > 0 and eta >= 0, got ({epsilon}, {eta})")));
    }
    let support = convolution_support(mu, nu);

    // separation: windows must be pairwise disjoint and clear of both the
    // support and its eta-enlargement
    for (i, p) in predictions.iter().enumerate() {
        for q in predictions.iter().skip(i + 1) {
            if (p.rho - q.rho).abs() <= 2.0 * epsilon {
                return Err(Error::Config(format!(
                    "epsilon = {epsilon} overlaps the windows at {} and {}",
                    p.rho, q.rho
                )));
            }
        }
        let d = support.distance(p.rho);
        if d <= epsilon {
            return Err(Error::Config(format!(
                "epsilon = {epsilon} reaches the support from the prediction at {} (distance {d:.4})",
                p.rho
            )));
        }
        if d <= eta {
            return Err(Error::Config(format!(
                "prediction at {} sits inside the eta-enlarged support (distance {d:.4} <= {eta})",
                p.rho
            )));
        }
    }

    let instance = build_model(mu, nu, spikes, n, seed)?;
    let k_eta = support.enlarge(eta);

    struct Trial {
        counts: Vec<usize>,
        strays: Vec<f64>,
    }

    let outcomes: Result<Vec<Trial>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64 + 1);
            let u = haar_unitary_from_rng(n, &mut rng);
            let x = deformed_matrix(&u, &instance.a_diag, &instance.b_diag);
            let eigs = hermitian_eigenvalues(&x)?;
            let counts = predictions
                .iter()
                .map(|p| {
                    eigs.iter()
                        .filter(|&&ev| ev > p.rho - epsilon && ev < p.rho + epsilon)
                        .count()
                })
                .collect();
            let strays = eigs
                .iter()
                .copied()
                .filter(|&ev| {
                    !k_eta.contains(ev)
                        && !predictions
                            .iter()
                            .any(|p| ev > p.rho - epsilon && ev < p.rho + epsilon)
                })
                .collect();
            Ok(Trial { counts, strays })
        })
        .collect();
    let outcomes = outcomes?;

    let mut report = SimulationReport {
        n,
        trials,
        epsilon,
        eta,
        seed,
        predictions: predictions
            .iter()
            .map(|p| PredictionOutcome {
                rho: p.rho,
                epsilon,
                expected: p.multiplicity,
                observed: Vec::with_capacity(trials),
                pass_fraction: 0.0,
            })
            .collect(),
        strays: Vec::new(),
        trial_pass: Vec::with_capacity(trials),
        pass_fraction: 0.0,
    };
    for (t, trial) in outcomes.iter().enumerate() {
        let mut pass = trial.strays.is_empty();
        for (j, &count) in trial.counts.iter().enumerate() {
            report.predictions[j].observed.push(count);
            pass &= count == predictions[j].multiplicity;
        }
        for &value in &trial.strays {
            report.strays.push(StrayEigenvalue { trial: t, value });
        }
        report.trial_pass.push(pass);
    }
    for (j, p) in report.predictions.iter_mut().enumerate() {
        let hits = p.observed.iter().filter(|&&c| c == predictions[j].multiplicity).count();
        p.pass_fraction = hits as f64 / trials as f64;
    }
    report.pass_fraction =
        report.trial_pass.iter().filter(|&&b| b).count() as f64 / trials as f64;
    Ok(report)
}

// ---------------------------------------------------------------- det(M_N)

/// Upper-left `r x r` corner of the resolvent `(lambda - (A' + U^H B U))^{-1}`,
/// where `A'` replaces the spike slots of the instance by `alpha`.
pub fn resolvent_corner(
    instance: &ModelInstance,
    spikes: &SpikeSet,
    alpha: f64,
    lambda: f64,
) -> Result<CMatrix> {
    let r = spikes.rank();
    let n = instance.n;
    if r == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let mut expanded = Vec::with_capacity(r);
    for s in spikes.spikes() {
        expanded.extend(std::iter::repeat(s.theta).take(s.multiplicity));
    }
    if instance.a_diag.len() < r || instance.a_diag[..r] != expanded[..] {
        return Err(Error::Config(
            "instance was not built from these spikes (leading diagonal mismatch)".into(),
        ));
    }

    let mut a_prime = instance.a_diag.clone();
    for slot in a_prime.iter_mut().take(r) {
        *slot = alpha;
    }
    let u = instance.sample_unitary();
    let h = deformed_matrix(&u, &a_prime, &instance.b_diag);
    // lambda I - H
    let shifted = CMatrix::from_fn(n, n, |i, j| {
        let v = -h.get(i, j);
        if i == j {
            v + lambda
        } else {
            v
        }
    });
    let rhs = CMatrix::from_fn(n, r, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let y = shifted.solve_columns(&rhs)?;
    Ok(CMatrix::from_fn(r, r, |i, j| y.get(i, j)))
}

/// `det(I_r - P R_N(lambda) P^t Theta)` with `Theta = diag(theta_j - alpha)`:
/// outside the enlarged support this determinant vanishes exactly at the
/// outlier eigenvalues of the sampled instance.
pub fn det_m_diagnostic(
    instance: &ModelInstance,
    spikes: &SpikeSet,
    alpha: f64,
    lambda: f64,
) -> Result<C64> {
    let r = spikes.rank();
    if r == 0 {
        return Ok(C64::new(1.0, 0.0)); // determinant of the empty matrix
    }
    let corner = resolvent_corner(instance, spikes, alpha, lambda)?;
    let mut theta = Vec::with_capacity(r);
    for s in spikes.spikes() {
        theta.extend(std::iter::repeat(s.theta - alpha).take(s.multiplicity));
    }
    let m = CMatrix::from_fn(r, r, |i, j| {
        let v = -corner.get(i, j) * theta[j];
        if i == j {
            v + 1.0
        } else {
            v
        }
    });
    Ok(determinant(m))
}

#[cfg(test)]
mod tests;
