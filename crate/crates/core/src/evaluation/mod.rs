//! Uplift and campaign metrics, and the hypothesis tests used to compare
//! estimators across assignment schemes.

mod qini;
mod stats;

pub use qini::{qini, QiniResult};
pub use stats::{binomial_test, kruskal_wallis, levene, Center, KruskalWallis, Levene};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};

/// Mean absolute error between predicted and true individual effects.
pub fn mae_ite(predictions: &[f64], truth: &[f64]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(invalid(format!(
            "{} predictions against {} true effects",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(invalid("MAE of an empty vector"));
    }
    let total: f64 = predictions.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum();
    let mae = total / predictions.len() as f64;
    if !mae.is_finite() {
        return Err(Error::Numerical("MAE is not finite".into()));
    }
    Ok(mae)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignStats {
    pub targeted_fraction: f64,
    pub conversion_rate: f64,
}

impl CampaignStats {
    /// Per-customer campaign profit: `conversion_rate * V - targeted_fraction * c`.
    pub fn profit(&self, setting: &ProfitSetting) -> f64 {
        self.conversion_rate * setting.conversion_value - self.targeted_fraction * setting.contact_cost
    }
}

/// Share of customers treated and share converting in an assigned dataset.
pub fn campaign_stats(ds: &Dataset) -> CampaignStats {
    let n = ds.n().max(1) as f64;
    CampaignStats {
        targeted_fraction: ds.treatment().iter().filter(|&&d| d > 0).count() as f64 / n,
        conversion_rate: ds.outcome().iter().map(|&y| f64::from(y)).sum::<f64>() / n,
    }
}

/// Value of a conversion and cost of a contact, in the same currency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfitSetting {
    pub conversion_value: f64,
    pub contact_cost: f64,
}

pub const DEFAULT_CONTACT_COST: f64 = 1.0;

impl ProfitSetting {
    pub fn new(conversion_value: f64, contact_cost: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(conversion_value) || !ok(contact_cost) {
            return Err(invalid("conversion value and contact cost must be finite and positive"));
        }
        Ok(ProfitSetting {
            conversion_value,
            contact_cost,
        })
    }
}

/// Conversion values 10, 15, ..., 50.
pub fn default_profit_grid() -> Vec<f64> {
    (0..9).map(|k| 10.0 + 5.0 * f64::from(k)).collect()
}

/// Profit per customer realized by running the experiment itself.
pub fn experiment_profit(ds: &Dataset, setting: &ProfitSetting) -> f64 {
    campaign_stats(ds).profit(setting)
}

/// Profit per customer from targeting everyone with `tau_hat * V > c`,
/// evaluated on the potential outcomes in `ds`.
pub fn policy_profit(predictions: &[f64], ds: &Dataset, setting: &ProfitSetting) -> Result<f64> {
    let truth = ds.require_truth()?;
    if predictions.len() != ds.n() {
        return Err(invalid(format!("{} predictions for {} rows", predictions.len(), ds.n())));
    }
    let (v, c) = (setting.conversion_value, setting.contact_cost);
    let total: f64 = predictions
        .iter()
        .zip(truth.y1.iter().zip(&truth.y0))
        .map(|(&t, (&y1, &y0))| {
            let base = f64::from(y0) * v;
            if t * v > c {
                base + (f64::from(y1) - f64::from(y0)) * v - c
            } else {
                base
            }
        })
        .sum();
    Ok(total / ds.n().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, FeatureSchema, Truth};
    use ndarray::Array2;
    use std::sync::Arc;

    fn truth_ds(y1: &[u8], y0: &[u8]) -> Dataset {
        let n = y1.len();
        let schema = Arc::new(FeatureSchema::new(vec![Column::numeric("x")]).unwrap());
        let ds = Dataset::unassigned(schema, Array2::zeros((n, 1)), vec![0; n]).unwrap();
        let ite = y1.iter().zip(y0).map(|(a, b)| f64::from(*a) - f64::from(*b)).collect();
        ds.with_truth(Truth {
            ite,
            y1: y1.to_vec(),
            y0: y0.to_vec(),
        })
        .unwrap()
    }

    #[test]
    fn mae_examples() {
        let t = [0.1, -0.2, 0.05];
        assert_eq!(mae_ite(&t, &t).unwrap(), 0.0);
        let shifted: Vec<f64> = t.iter().map(|v| v + 0.01).collect();
        assert!((mae_ite(&shifted, &t).unwrap() - 0.01).abs() < 1e-15);
        assert!(mae_ite(&t[..2], &t).is_err());
    }

    #[test]
    fn profit_decomposition() {
        let s = ProfitSetting::new(10.0, 1.0).unwrap();
        let full = CampaignStats {
            targeted_fraction: 0.5,
            conversion_rate: 0.135,
        };
        assert!((full.profit(&s) - 0.85).abs() < 1e-12);
        let none = CampaignStats {
            targeted_fraction: 0.0,
            conversion_rate: 0.109,
        };
        assert!((none.profit(&s) - 1.09).abs() < 1e-12);
        assert!(ProfitSetting::new(0.0, 1.0).is_err());
        assert!(ProfitSetting::new(10.0, f64::NAN).is_err());
        assert_eq!(default_profit_grid(), vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]);
    }

    #[test]
    fn policy_profit_cases() {
        let ds = truth_ds(&[1, 1, 0, 1], &[0, 1, 0, 0]);
        let s = ProfitSetting::new(30.0, 1.0).unwrap();
        // Nobody targeted: mean(y0) * V.
        assert!((policy_profit(&[0.0; 4], &ds, &s).unwrap() - 7.5).abs() < 1e-12);
        // Target the truly persuadable rows 0 and 3: 7.5 + 2 * (30 - 1) / 4.
        let p = policy_profit(&[0.5, -0.1, 0.0, 0.5], &ds, &s).unwrap();
        assert!((p - (7.5 + 14.5)).abs() < 1e-12);
        // Targeting by truth never loses to any other target set here.
        let best = policy_profit(&ds.truth().unwrap().ite.clone(), &ds, &s).unwrap();
        assert!(best >= policy_profit(&[1.0; 4], &ds, &s).unwrap());
    }

    #[test]
    fn campaign_stats_counts() {
        let ds = truth_ds(&[1, 1, 0, 1], &[0, 1, 0, 0]);
        let assigned = ds.with_assignment(vec![1, 0, 1, 1], vec![0.5; 4]).unwrap();
        let st = campaign_stats(&assigned);
        assert_eq!(st.targeted_fraction, 0.75);
        assert_eq!(st.conversion_rate, 0.75);
    }
}
