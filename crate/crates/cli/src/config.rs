//! Experiment configuration: a small TOML schema describing the model, the
//! sweep grid, and the experiment kind.

use anyhow::{bail, Context, Result};
use decofree::models::CouplingTemplate;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// One of: free, xy4, cdd, hybrid, real_pulse.
    pub experiment: String,
    /// Output path; stdout when absent (may be overridden on the command line).
    pub out: Option<String>,
    pub model: ModelSection,
    pub grid: GridSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub template: String,
    pub n_qubits: usize,
    pub bath_dim: usize,
    pub j: f64,
    pub beta: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub taus: Vec<f64>,
    #[serde(default)]
    pub ms: Vec<usize>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub ps: Vec<f64>,
}

pub const EXPERIMENTS: [&str; 5] = ["free", "xy4", "cdd", "hybrid", "real_pulse"];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("parsing experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn template(&self) -> Result<CouplingTemplate> {
        CouplingTemplate::parse(&self.model.template)
            .with_context(|| format!("unknown coupling template {:?}", self.model.template))
    }

    fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            bail!(
                "unknown experiment {:?}; expected one of {}",
                self.experiment,
                EXPERIMENTS.join(", ")
            );
        }
        self.template()?;
        if self.model.n_qubits == 0 || self.model.bath_dim == 0 {
            bail!("model needs n_qubits ≥ 1 and bath_dim ≥ 1");
        }
        let need = |name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(anyhow::anyhow!(
                    "experiment {:?} needs a nonempty grid.{name}",
                    self.experiment
                ))
            }
        };
        match self.experiment.as_str() {
            "free" | "xy4" | "hybrid" => need("taus", !self.grid.taus.is_empty())?,
            "cdd" => {
                need("taus", !self.grid.taus.is_empty())?;
                need("ms", !self.grid.ms.is_empty())?;
            }
            "real_pulse" => {
                need("taus", !self.grid.taus.is_empty())?;
                need("deltas", !self.grid.deltas.is_empty())?;
            }
            _ => unreachable!(),
        }
        if self.grid.taus.iter().any(|&t| t <= 0.0)
            || self.grid.deltas.iter().any(|&d| d <= 0.0)
        {
            bail!("grid entries must be positive");
        }
        if self.experiment == "hybrid" && self.model.n_qubits != 2 {
            bail!("the hybrid experiment is defined for n_qubits = 2");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
experiment = "xy4"
[model]
template = "general_pauli"
n_qubits = 1
bath_dim = 4
j = 1.0
beta = 1.0
seed = 42
[grid]
taus = [0.03125, 0.015625]
"#;

    #[test]
    fn parses_valid_config() {
        let cfg = ExperimentConfig::parse(GOOD).unwrap();
        assert_eq!(cfg.experiment, "xy4");
        assert_eq!(cfg.model.seed, 42);
        assert_eq!(cfg.grid.taus.len(), 2);
    }

    #[test]
    fn rejects_empty_grid() {
        let bad = GOOD.replace("taus = [0.03125, 0.015625]", "taus = []");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }

    #[test]
    fn rejects_unknown_experiment_and_template() {
        assert!(ExperimentConfig::parse(&GOOD.replace("\"xy4\"", "\"warp\"")).is_err());
        assert!(ExperimentConfig::parse(&GOOD.replace("general_pauli", "nope")).is_err());
    }

    #[test]
    fn rejects_unknown_field() {
        let bad = format!("{GOOD}\nbogus = 1\n");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }
}
