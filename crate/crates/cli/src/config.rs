//! Run configuration, read from TOML and overridable from the command line.
//!
//! Every field has a default, so an empty file (or no file) reproduces the
//! reference simulation settings.

use std::path::Path;

use anyhow::{Context, Result};
use assocq::bounds::ShiftedRateConfig;
use assocq::montecarlo::TGrid;
use assocq::rng::derive_seed;
use assocq::{build_model, CoefficientScheme, ExperimentConfig, MovingAverageModel};
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub replications: usize,
    pub t_grid: TGrid,
    pub p_levels: Vec<f64>,
    pub n_values: Vec<usize>,
    pub cases: Vec<CaseConfig>,
    pub rates: RatesConfig,
    pub checks: ChecksConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub name: String,
    pub scheme: CoefficientScheme,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesConfig {
    pub n_values: Vec<usize>,
    pub p_levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub p_levels: Vec<f64>,
    pub shifted_rate: ShiftedRateConfig,
    pub gap_n_values: Vec<usize>,
    pub gap_t_values: Vec<f64>,
    /// Indicator threshold for the simulated sums.
    pub threshold: f64,
    pub tail_n_values: Vec<usize>,
    pub tail_eps: Vec<f64>,
    pub tail_replications: usize,
    pub moment_n_values: Vec<usize>,
    pub moment_q: Vec<u32>,
    pub moment_replications: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            replications: 100_000,
            t_grid: TGrid::default(),
            p_levels: vec![0.2, 0.7],
            n_values: vec![100, 500, 1000],
            cases: vec![
                CaseConfig { name: "case1".into(), scheme: CoefficientScheme::Exponential { rho: 0.1 }, m: 100 },
                CaseConfig { name: "case2".into(), scheme: CoefficientScheme::Polynomial { s: 7.0 }, m: 100 },
            ],
            rates: RatesConfig::default(),
            checks: ChecksConfig::default(),
        }
    }
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self { n_values: vec![100, 200, 400, 800, 1600, 3200], p_levels: vec![0.2, 0.7] }
    }
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            p_levels: vec![0.2, 0.7],
            shifted_rate: ShiftedRateConfig::default(),
            gap_n_values: vec![10, 100, 1_000, 10_000, 100_000, 1_000_000],
            gap_t_values: vec![0.0, 1.0, -2.0],
            threshold: 0.0,
            tail_n_values: vec![1_000, 10_000],
            tail_eps: vec![0.05, 0.1, 0.2, 0.3],
            tail_replications: 2_000,
            moment_n_values: vec![100, 1_000, 10_000],
            moment_q: vec![2, 4, 6],
            moment_replications: 2_000,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub grid_step: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut config = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))
                    .map_err(|e| UsageError(format!("{e:#}")))?;
                Self::from_toml(&text).map_err(|e| UsageError(format!("{}: {e:#}", path.display())))?
            }
            None => Self::default(),
        };
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(r) = overrides.replications {
            config.replications = r;
        }
        if let Some(step) = overrides.grid_step {
            config.t_grid.step = step;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.cases.is_empty() {
            return Err(UsageError("at least one case is required".into()).into());
        }
        for (i, case) in self.cases.iter().enumerate() {
            if self.cases[..i].iter().any(|c| c.name == case.name) {
                return Err(UsageError(format!("duplicate case name {:?}", case.name)).into());
            }
            case.model()?;
        }
        // the experiment validation covers R, the grid, p and n
        self.experiment(0, self.p_levels.clone(), self.n_values.clone())?.validate().map_err(usage)?;
        Ok(())
    }

    /// Experiment for one case. Each case gets its own derived seed.
    pub fn experiment(&self, case: usize, p_levels: Vec<f64>, n_values: Vec<usize>) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            model: self.cases[case].model()?,
            p_levels,
            n_values,
            replications: self.replications,
            t_grid: self.t_grid,
            master_seed: self.case_seed(case),
        })
    }

    pub fn case_seed(&self, case: usize) -> u64 {
        derive_seed(self.seed, case as u64 + 1)
    }
}

impl CaseConfig {
    pub fn model(&self) -> Result<MovingAverageModel> {
        build_model(self.scheme, self.m).map_err(|e| UsageError(format!("case {:?}: {e}", self.name)).into())
    }
}

pub(crate) fn usage(e: assocq::Error) -> anyhow::Error {
    match e {
        assocq::Error::Config(_) | assocq::Error::Domain { .. } => UsageError(e.to_string()).into(),
        other => other.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file() {
        let c = RunConfig::from_toml(
            "seed = 7\nn_values = [50, 60]\n[[cases]]\nname = \"iid\"\nm = 1\nscheme = { kind = \"exponential\", rho = 0.5 }\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.cases.len(), 1);
        assert_eq!(c.replications, 100_000);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_field_names_the_field() {
        let e = RunConfig::from_toml("seeds = 3\n").unwrap_err();
        assert!(format!("{e:#}").contains("seeds"), "{e:#}");
    }

    #[test]
    fn invalid_values_rejected() {
        let c = RunConfig { replications: 10, ..RunConfig::default() };
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.cases[0].m = 0;
        assert!(c.validate().is_err());
        let c = RunConfig { n_values: vec![500, 100], ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn case_seeds_differ() {
        let c = RunConfig::default();
        assert_ne!(c.case_seed(0), c.case_seed(1));
    }
}
