//! Experiment configuration, read from TOML.

use crate::LabError;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const EXPERIMENTS: [&str; 9] =
    ["theorem1", "block", "splitting", "shift-growth", "median-verify", "nwo", "factorization", "continuum", "transference"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub i: Option<Vec<usize>>,
    pub j: Option<Vec<usize>>,
    #[serde(rename = "A")]
    pub a: Option<Vec<f64>>,
    pub step: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default = "four")]
    pub depth: usize,
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "twenty")]
    pub trials: usize,
    /// Quadrature level of the continuum integral.
    #[serde(default = "one_u32")]
    pub level: u32,
    #[serde(default)]
    pub sweep: Sweep,
    pub out: Option<String>,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn four() -> usize {
    4
}
fn twenty() -> usize {
    20
}
fn one_u32() -> u32 {
    1
}
fn default_p() -> Vec<f64> {
    vec![2.0]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return bad(format!("unknown experiment `{}` (known: {})", self.experiment, EXPERIMENTS.join(", ")));
        }
        if self.d < 2 || self.dim == 0 || self.depth == 0 || self.m == 0 || self.trials == 0 {
            return bad("d ≥ 2 and positive dim, depth, m, trials required".into());
        }
        if self.p.is_empty() || self.p.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return bad(format!("p must be a nonempty list of positive numbers, got {:?}", self.p));
        }
        if self.dim > 1 && self.d != 2 {
            return bad("dim > 1 needs d = 2".into());
        }
        match self.experiment.as_str() {
            "shift-growth" => {
                if self.d != 2 {
                    return bad("shift-growth needs d = 2".into());
                }
                let top = self.sweep_i().into_iter().chain(self.sweep_j()).max().unwrap_or(0);
                if top + 1 > self.depth {
                    return bad(format!("complexity {top} needs depth > {top}, got {}", self.depth));
                }
            }
            "splitting" => {
                if self.p.iter().any(|&p| p >= 1.0) {
                    return bad("splitting bounds are stated for p < 1".into());
                }
                if self.sweep_step().contains(&0) {
                    return bad("step must be positive".into());
                }
            }
            "nwo" if self.dim > 2 => return bad("nwo supports dim 1 or 2".into()),
            "continuum" if self.dim > 2 => return bad("continuum supports dim 1 or 2".into()),
            "factorization" => {
                if self.sweep_a().iter().any(|&a| !(a > 1.0)) {
                    return bad("A values must exceed 1".into());
                }
            }
            "transference" if self.depth > 3 => return bad("transference levels are limited to 3".into()),
            _ => {}
        }
        Ok(())
    }

    pub fn sweep_i(&self) -> Vec<usize> {
        self.sweep.i.clone().unwrap_or_else(|| (0..4).collect())
    }

    pub fn sweep_j(&self) -> Vec<usize> {
        self.sweep.j.clone().unwrap_or_else(|| (0..4).collect())
    }

    pub fn sweep_a(&self) -> Vec<f64> {
        self.sweep.a.clone().unwrap_or_else(|| vec![8.0, 16.0, 32.0])
    }

    pub fn sweep_step(&self) -> Vec<usize> {
        self.sweep.step.clone().unwrap_or_else(|| vec![2, 3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_toml("experiment = \"theorem1\"\nseed = 3\n").unwrap();
        assert_eq!((c.d, c.dim, c.depth, c.m, c.trials), (2, 1, 4, 1, 20));
        assert_eq!(c.p, vec![2.0]);
        assert_eq!(c.sweep_a(), vec![8.0, 16.0, 32.0]);
    }

    #[test]
    fn seed_is_mandatory() {
        let e = ExperimentConfig::from_toml("experiment = \"theorem1\"\n").unwrap_err();
        assert!(e.to_string().contains("seed"), "{e}");
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "experiment = \"nope\"\nseed = 1",
            "experiment = \"theorem1\"\nseed = 1\nd = 1",
            "experiment = \"theorem1\"\nseed = 1\np = [-1.0]",
            "experiment = \"shift-growth\"\nseed = 1\ndepth = 3",
            "experiment = \"splitting\"\nseed = 1\np = [2.0]",
            "experiment = \"theorem1\"\nseed = 1\ncolour = 2",
        ] {
            assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
        }
    }

    #[test]
    fn sweeps_parse() {
        let c = ExperimentConfig::from_toml("experiment = \"factorization\"\nseed = 1\n[sweep]\nA = [10.0, 20.0]\n").unwrap();
        assert_eq!(c.sweep_a(), vec![10.0, 20.0]);
    }
}
