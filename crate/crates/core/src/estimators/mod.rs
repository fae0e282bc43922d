//! Effect estimators: population-level ATE estimators and per-customer
//! uplift learners. All of them read the logged propensities.

mod ate;
pub mod forest;
pub mod logistic;
mod two_model;

pub use ate::{ate_dr, ate_ipw, ate_naive, ipw_leaf_effect, AteEstimate, AteMethod};
pub use forest::{fit_causal_forest, CausalForest, CausalTree, ForestParams, Node, TreeSamples};
pub use logistic::{fit_logistic, fit_logistic_with, IrlsOptions, LogisticModel};
pub use two_model::{fit_two_model, fit_two_model_with, TwoModel, MIN_ARM_ROWS};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;

/// A fitted uplift learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FittedUpliftModel {
    TwoModel(TwoModel),
    CausalForest(CausalForest),
}

impl FittedUpliftModel {
    /// Predicted individual treatment effect for every row of `ds`.
    pub fn predict(&self, ds: &Dataset) -> Vec<f64> {
        match self {
            FittedUpliftModel::TwoModel(m) => m.predict(ds),
            FittedUpliftModel::CausalForest(f) => f.predict(ds),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FittedUpliftModel::TwoModel(_) => "two_model",
            FittedUpliftModel::CausalForest(_) => "causal_forest",
        }
    }
}
