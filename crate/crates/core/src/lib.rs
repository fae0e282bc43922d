//! Supervised randomization for uplift campaigns: ground-truth simulation,
//! score-driven treatment assignment with logged propensities, bias-corrected
//! effect estimators, uplift learners and the Monte Carlo harness comparing
//! assignment schemes.

pub mod data;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod harness;
pub mod numeric;
pub mod randomization;
pub mod rng;
pub mod selftest;
pub mod simulation;

pub use data::{Column, ColumnKind, Dataset, FeatureSchema, Truth};
pub use error::{Error, ErrorClass, Result};
pub use estimators::{AteEstimate, AteMethod, CausalForest, FittedUpliftModel, ForestParams, LogisticModel};
pub use evaluation::{CampaignStats, ProfitSetting, QiniResult};
pub use harness::{ExperimentConfig, RunReport};
pub use randomization::{AssignmentScheme, PropensityMapping, SchemeSpec};
