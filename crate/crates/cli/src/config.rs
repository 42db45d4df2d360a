//! Run configuration: a single JSON document plus flag overrides.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use freeconv::{Error, MeasureSpec, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mu: MeasureSpec,
    pub nu: MeasureSpec,
    #[serde(default)]
    pub spikes: Vec<(f64, usize)>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub epsilon_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub simulation: Option<SimSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_output_dir() -> String {
    "out".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub n: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub seed: u64,
}

/// Flag overrides applied on top of the config document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn load(path: &str, overrides: &Overrides) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config '{path}': {e}")))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("bad config '{path}': {e}")))?;
        if let Some(out) = &overrides.out {
            config.output_dir = out.clone();
        }
        if overrides.n.is_some()
            || overrides.seed.is_some()
            || overrides.trials.is_some()
            || overrides.epsilon.is_some()
            || overrides.eta.is_some()
        {
            let sim = config.simulation.get_or_insert(SimSpec {
                n: 1000,
                trials: 10,
                epsilon: 0.1,
                eta: 0.1,
                seed: 1,
            });
            if let Some(n) = overrides.n {
                sim.n = n;
            }
            if let Some(seed) = overrides.seed {
                sim.seed = seed;
            }
            if let Some(trials) = overrides.trials {
                sim.trials = trials;
            }
            if let Some(epsilon) = overrides.epsilon {
                sim.epsilon = epsilon;
            }
            if let Some(eta) = overrides.eta {
                sim.eta = eta;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(grid) = &self.grid {
            if !(grid.lo < grid.hi) || grid.points < 2 {
                return Err(Error::Config(format!(
                    "grid needs lo < hi and points >= 2, got ({}, {}, {})",
                    grid.lo, grid.hi, grid.points
                )));
            }
        }
        if let Some(ladder) = &self.epsilon_ladder {
            if ladder.is_empty()
                || ladder.iter().any(|&e| !(e > 0.0))
                || ladder.windows(2).any(|w| w[1] >= w[0])
            {
                return Err(Error::Config(format!(
                    "epsilon_ladder must be positive and decreasing: {ladder:?}"
                )));
            }
        }
        if let Some(sim) = &self.simulation {
            if sim.trials < 1 {
                return Err(Error::Config("simulation.trials must be >= 1".into()));
            }
            if !(sim.epsilon > 0.0) || !(sim.eta > 0.0) {
                return Err(Error::Config(format!(
                    "simulation tolerances must be positive, got epsilon = {}, eta = {}",
                    sim.epsilon, sim.eta
                )));
            }
            if sim.n < 1 {
                return Err(Error::Config("simulation.n must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Hash of the effective configuration (after overrides); embedded in
    /// every output file so results are traceable to their inputs.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn echo_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn ladder(&self) -> Vec<f64> {
        self.epsilon_ladder
            .clone()
            .unwrap_or_else(|| freeconv::subordination::DEFAULT_LADDER.to_vec())
    }
}
