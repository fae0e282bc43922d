use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::estimators::ForestParams;
use crate::evaluation::{default_profit_grid, DEFAULT_CONTACT_COST};
use crate::randomization::SchemeSpec;
use crate::simulation::{default_tau_columns, DEFAULT_ATE, DEFAULT_BASE_RATE, DEFAULT_ORACLE_SIGMA, DEFAULT_ROWS, DEFAULT_SD};

/// Where the customer table comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Built-in bank-like table with a logistic base-rate model.
    Synthetic {
        #[serde(default = "default_rows")]
        n: usize,
        #[serde(default = "default_base_rate")]
        base_rate: f64,
    },
    /// A CSV file described by a JSON schema. Files carrying ground-truth
    /// columns are used as they are; otherwise every customer is taken to
    /// have been treated and control outcomes are derived by label flipping.
    Csv {
        path: PathBuf,
        schema: PathBuf,
        #[serde(default = "default_target")]
        target: String,
    },
}

fn default_rows() -> usize {
    DEFAULT_ROWS
}
fn default_base_rate() -> f64 {
    DEFAULT_BASE_RATE
}
fn default_target() -> String {
    "y".into()
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic {
            n: DEFAULT_ROWS,
            base_rate: DEFAULT_BASE_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauConfig {
    /// Seed of the effect network; derived from the master seed when absent.
    pub seed: Option<u64>,
    pub columns: Vec<String>,
    pub ate: f64,
    pub sd: f64,
}

impl Default for TauConfig {
    fn default() -> Self {
        TauConfig {
            seed: None,
            columns: default_tau_columns(),
            ate: DEFAULT_ATE,
            sd: DEFAULT_SD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoModel,
    CausalForest,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::TwoModel => "two_model",
            ModelKind::CausalForest => "causal_forest",
        }
    }
}

/// Name under which the constant training-ATE predictor is reported.
pub const ATE_REFERENCE: &str = "ate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data_source: DataSource,
    pub tau: TauConfig,
    pub oracle_sigma: f64,
    pub schemes: Vec<SchemeSpec>,
    pub folds: usize,
    pub draws_per_fold: usize,
    /// Uplift learners fitted in every repetition. An empty list runs the
    /// ATE estimators only.
    pub models: Vec<ModelKind>,
    /// Inverse-propensity weights in the two-model learner (also used as the
    /// outcome models of the doubly robust estimator).
    pub two_model_ipw: bool,
    /// Forest settings; the seed is replaced per repetition.
    pub forest: ForestParams,
    pub profit_grid: Vec<f64>,
    pub contact_cost: f64,
    /// Weight the holdout Qini by inverse propensities.
    pub qini_weighted: bool,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data_source: DataSource::default(),
            tau: TauConfig::default(),
            oracle_sigma: DEFAULT_ORACLE_SIGMA,
            schemes: SchemeSpec::defaults(),
            folds: 4,
            draws_per_fold: 50,
            models: vec![ModelKind::TwoModel, ModelKind::CausalForest],
            two_model_ipw: true,
            forest: ForestParams::default(),
            profit_grid: default_profit_grid(),
            contact_cost: DEFAULT_CONTACT_COST,
            qini_weighted: false,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| invalid(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn repetitions(&self) -> usize {
        self.folds * self.draws_per_fold
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(invalid("folds must be at least 2"));
        }
        if self.draws_per_fold == 0 {
            return Err(invalid("draws_per_fold must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(invalid("at least one assignment scheme is required"));
        }
        let mut names = HashSet::new();
        for s in &self.schemes {
            s.validate()?;
            if !names.insert(s.name()) {
                return Err(invalid(format!("duplicate scheme name `{}`", s.name())));
            }
        }
        let mut models = HashSet::new();
        if !self.models.iter().all(|m| models.insert(*m)) {
            return Err(invalid("models must not repeat"));
        }
        if !(self.oracle_sigma >= 0.0 && self.oracle_sigma.is_finite()) {
            return Err(invalid("oracle_sigma must be finite and non-negative"));
        }
        if !(self.tau.sd >= 0.0 && self.tau.sd.is_finite() && self.tau.ate.is_finite()) {
            return Err(invalid("tau.ate must be finite and tau.sd non-negative"));
        }
        if self.profit_grid.is_empty() || self.profit_grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("profit_grid needs positive conversion values"));
        }
        if !(self.contact_cost.is_finite() && self.contact_cost > 0.0) {
            return Err(invalid("contact_cost must be positive"));
        }
        if let DataSource::Synthetic { n, base_rate } = &self.data_source {
            if *n < 2 * self.folds {
                return Err(invalid(format!("{n} rows are too few for {} folds", self.folds)));
            }
            if !(*base_rate > 0.0 && *base_rate < 1.0) {
                return Err(invalid("base_rate must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// Compact JSON of the resolved configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Self::canonical_json`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
