//! Treatment assignment: full (A/B) randomization and supervised
//! randomization, where an existing score sets each customer's treatment
//! probability through a piecewise-constant mapping.
//!
//! Every assignment draws `D_i = 1{U_i < e_i}` with `U_i` taken from a stream
//! keyed by `(seed, repetition, row id)`. Schemes evaluated with the same key
//! therefore share their uniforms, and the probability `e_i` used for each
//! draw is logged on the row.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{invalid, Error, Result};
use crate::rng::{domain, StreamKey};

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_E_LO: f64 = 0.05;
pub const DEFAULT_E_HI: f64 = 0.95;

/// Piecewise-constant map from score to treatment probability.
///
/// A score `s` falls in bin `k` when `thresholds[k-1] < s <= thresholds[k]`;
/// scores beyond either end clamp to the first or last bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMapping")]
pub struct PropensityMapping {
    thresholds: Vec<f64>,
    probabilities: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMapping {
    thresholds: Vec<f64>,
    probabilities: Vec<f64>,
}

impl TryFrom<RawMapping> for PropensityMapping {
    type Error = Error;
    fn try_from(raw: RawMapping) -> Result<Self> {
        PropensityMapping::new(raw.thresholds, raw.probabilities)
    }
}

impl PropensityMapping {
    pub fn new(thresholds: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != thresholds.len() + 1 {
            return Err(invalid(format!(
                "{} thresholds need {} probabilities, got {}",
                thresholds.len(),
                thresholds.len() + 1,
                probabilities.len()
            )));
        }
        if thresholds.iter().any(|t| !t.is_finite()) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("thresholds must be finite and strictly increasing"));
        }
        if let Some(e) = probabilities.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(invalid(format!("treatment probability {e} is outside (0, 1)")));
        }
        Ok(Self {
            thresholds,
            probabilities,
        })
    }

    /// A single bin with probability `e` everywhere.
    pub fn constant(e: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![e])
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn bins(&self) -> usize {
        self.probabilities.len()
    }

    /// Zero-based bin of a score.
    pub fn bin(&self, score: f64) -> usize {
        self.thresholds.partition_point(|t| *t < score)
    }

    pub fn probability(&self, score: f64) -> f64 {
        self.probabilities[self.bin(score)]
    }
}

/// `k` probabilities rising linearly from `e_lo` to `e_hi`.
fn linear_probabilities(k: usize, e_lo: f64, e_hi: f64) -> Vec<f64> {
    if k == 1 {
        return vec![e_lo];
    }
    (0..k)
        .map(|j| {
            // Pin the top bin to e_hi; the ramp can round just above it.
            if j == k - 1 {
                e_hi
            } else {
                e_lo + j as f64 * (e_hi - e_lo) / (k - 1) as f64
            }
        })
        .collect()
}

fn check_mapping_args(train_scores: &[f64], k: usize, e_lo: f64, e_hi: f64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(invalid("mapping needs at least one bin"));
    }
    if !(0.0 < e_lo && e_lo <= e_hi && e_hi < 1.0) {
        return Err(invalid(format!(
            "need 0 < e_lo <= e_hi < 1, got e_lo={e_lo}, e_hi={e_hi}"
        )));
    }
    if train_scores.iter().any(|s| !s.is_finite()) {
        return Err(invalid("training scores must be finite"));
    }
    let lo = train_scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = train_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo >= hi {
        return Err(invalid("training scores have a degenerate range"));
    }
    Ok((lo, hi))
}

/// Cut `[min, max]` of the training scores into `k` equal-width bins with
/// linearly increasing probabilities.
pub fn build_linear_mapping(train_scores: &[f64], k: usize, e_lo: f64, e_hi: f64) -> Result<PropensityMapping> {
    let (lo, hi) = check_mapping_args(train_scores, k, e_lo, e_hi)?;
    let width = (hi - lo) / k as f64;
    let thresholds = (1..k).map(|j| lo + j as f64 * width).collect();
    PropensityMapping::new(thresholds, linear_probabilities(k, e_lo, e_hi))
}

/// Like [`build_linear_mapping`], but the `k` bins hold equal shares of the
/// training scores (cuts at the empirical `j/k` quantiles).
pub fn build_quantile_mapping(train_scores: &[f64], k: usize, e_lo: f64, e_hi: f64) -> Result<PropensityMapping> {
    check_mapping_args(train_scores, k, e_lo, e_hi)?;
    let mut sorted = train_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let thresholds: Vec<f64> = (1..k)
        .map(|j| {
            let h = (n - 1) as f64 * j as f64 / k as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        })
        .collect();
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(
            "training scores have too many ties for equal-share bins",
        ));
    }
    PropensityMapping::new(thresholds, linear_probabilities(k, e_lo, e_hi))
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentVariant {
    /// Every row treated with the same probability.
    Full { e: f64 },
    /// Row `i` treated with probability `mapping(scores[i])`.
    Supervised {
        mapping: PropensityMapping,
        scores: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentScheme {
    pub variant: AssignmentVariant,
    pub seed: u64,
    pub repetition: u64,
}

impl AssignmentScheme {
    pub fn full(e: f64, seed: u64, repetition: u64) -> Self {
        Self {
            variant: AssignmentVariant::Full { e },
            seed,
            repetition,
        }
    }

    pub fn supervised(mapping: PropensityMapping, scores: Vec<f64>, seed: u64, repetition: u64) -> Self {
        Self {
            variant: AssignmentVariant::Supervised { mapping, scores },
            seed,
            repetition,
        }
    }

    /// Treatment probability for every row of a dataset with `n` rows.
    pub fn propensities(&self, n: usize) -> Result<Vec<f64>> {
        let e: Vec<f64> = match &self.variant {
            AssignmentVariant::Full { e } => vec![*e; n],
            AssignmentVariant::Supervised { mapping, scores } => {
                if scores.len() != n {
                    return Err(invalid(format!(
                        "{} scores supplied for {n} rows",
                        scores.len()
                    )));
                }
                scores.iter().map(|&s| mapping.probability(s)).collect()
            }
        };
        if let Some((i, v)) = e.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
            return Err(invalid(format!("treatment probability {v} at row {i} is outside (0, 1)")));
        }
        Ok(e)
    }

    fn key(&self) -> StreamKey {
        StreamKey::new(self.seed, domain::ASSIGN, self.repetition)
    }
}

/// Draw treatments and realize outcomes from the ground truth.
pub fn assign(ds: &Dataset, scheme: &AssignmentScheme) -> Result<Dataset> {
    ds.require_truth()?;
    let e = scheme.propensities(ds.n())?;
    let key = scheme.key();
    let treatment = ds
        .row_ids()
        .iter()
        .zip(&e)
        .map(|(&id, &p)| u8::from(key.uniform(id) < p))
        .collect();
    ds.with_assignment(treatment, e)
}

/// Deterministic targeting: 1 iff `score > threshold`. Infinite thresholds give
/// the target-nobody / target-everybody policies.
pub fn deterministic_policy(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s > threshold)).collect()
}

/// How a supervised scheme lays its bins over the training scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    EqualWidth,
    #[default]
    EqualMass,
}

/// Configuration-level description of an assignment scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeSpec {
    Full {
        name: String,
        e: f64,
    },
    Supervised {
        name: String,
        bins: usize,
        e_lo: f64,
        e_hi: f64,
        #[serde(default)]
        binning: Binning,
    },
}

impl SchemeSpec {
    pub fn full(e: f64) -> Self {
        let name = if e == 0.5 { "full".to_owned() } else { "full_imb".to_owned() };
        SchemeSpec::Full { name, e }
    }

    pub fn supervised_default() -> Self {
        SchemeSpec::Supervised {
            name: "supervised".into(),
            bins: DEFAULT_BINS,
            e_lo: DEFAULT_E_LO,
            e_hi: DEFAULT_E_HI,
            binning: Binning::EqualMass,
        }
    }

    /// Full at 0.5, imbalanced full at 0.666 and default supervised.
    pub fn defaults() -> Vec<Self> {
        vec![Self::full(0.5), Self::full(0.666), Self::supervised_default()]
    }

    pub fn name(&self) -> &str {
        match self {
            SchemeSpec::Full { name, .. } | SchemeSpec::Supervised { name, .. } => name,
        }
    }

    pub fn is_supervised(&self) -> bool {
        matches!(self, SchemeSpec::Supervised { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchemeSpec::Full { e, .. } => {
                if !(*e > 0.0 && *e < 1.0) {
                    return Err(invalid(format!("full randomization needs e in (0, 1), got {e}")));
                }
            }
            SchemeSpec::Supervised { bins, e_lo, e_hi, .. } => {
                if *bins == 0 || !(0.0 < *e_lo && e_lo <= e_hi && *e_hi < 1.0) {
                    return Err(invalid(format!(
                        "supervised scheme needs bins >= 1 and 0 < e_lo <= e_hi < 1 (bins={bins}, e_lo={e_lo}, e_hi={e_hi})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Build the mapping for a supervised scheme from training scores.
    pub fn mapping(&self, train_scores: &[f64]) -> Result<Option<PropensityMapping>> {
        match self {
            SchemeSpec::Full { .. } => Ok(None),
            SchemeSpec::Supervised {
                bins,
                e_lo,
                e_hi,
                binning,
                ..
            } => Ok(Some(match binning {
                Binning::EqualWidth => build_linear_mapping(train_scores, *bins, *e_lo, *e_hi)?,
                Binning::EqualMass => build_quantile_mapping(train_scores, *bins, *e_lo, *e_hi)?,
            })),
        }
    }

    /// Concrete scheme for one repetition. `scores` are the scores of the rows
    /// to assign; `train_scores` define the supervised mapping.
    pub fn instantiate(
        &self,
        train_scores: &[f64],
        scores: &[f64],
        seed: u64,
        repetition: u64,
    ) -> Result<(AssignmentScheme, Option<PropensityMapping>)> {
        self.validate()?;
        match self {
            SchemeSpec::Full { e, .. } => Ok((AssignmentScheme::full(*e, seed, repetition), None)),
            SchemeSpec::Supervised { .. } => {
                let mapping = self.mapping(train_scores)?.expect("supervised has a mapping");
                Ok((
                    AssignmentScheme::supervised(mapping.clone(), scores.to_vec(), seed, repetition),
                    Some(mapping),
                ))
            }
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `full`, `full:E`, `supervised`, `supervised:K` (equal-share bins) or
/// `supervised-width[:K]` (equal-width bins).
impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let spec = match kind {
            "full" => {
                let e = match param {
                    Some(p) => p
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("bad probability `{p}` in scheme `{s}`")))?,
                    None => 0.5,
                };
                SchemeSpec::full(e)
            }
            "supervised" | "supervised-width" => {
                let bins = match param {
                    Some(p) => p
                        .parse::<usize>()
                        .map_err(|_| invalid(format!("bad bin count `{p}` in scheme `{s}`")))?,
                    None => DEFAULT_BINS,
                };
                let binning = if kind == "supervised" {
                    Binning::EqualMass
                } else {
                    Binning::EqualWidth
                };
                SchemeSpec::Supervised {
                    name: kind.replace('-', "_"),
                    bins,
                    e_lo: DEFAULT_E_LO,
                    e_hi: DEFAULT_E_HI,
                    binning,
                }
            }
            _ => return Err(invalid(format!("unknown scheme `{s}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_scores(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn linear_mapping_spans_05_to_095() {
        let m = build_linear_mapping(&unit_scores(101), 10, 0.05, 0.95).unwrap();
        let expected = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95];
        for (e, x) in m.probabilities().iter().zip(expected) {
            assert!((e - x).abs() < 1e-12);
        }
        assert_eq!(m.thresholds().len(), 9);
    }

    #[test]
    fn single_bin_uses_e_lo() {
        let m = build_linear_mapping(&unit_scores(11), 1, 0.3, 0.9).unwrap();
        assert_eq!(m.bins(), 1);
        for s in [-5.0, 0.0, 0.5, 1.0, 7.0] {
            assert_eq!(m.probability(s), 0.3);
        }
    }

    #[test]
    fn two_bins_quartiles() {
        let m = build_linear_mapping(&unit_scores(11), 2, 0.2, 0.8).unwrap();
        assert_eq!(m.probability(0.25), 0.2);
        assert_eq!(m.probability(0.75), 0.8);
    }

    #[test]
    fn out_of_range_scores_clamp() {
        let m = build_linear_mapping(&unit_scores(11), 10, 0.05, 0.95).unwrap();
        assert_eq!(m.probability(-3.0), 0.05);
        assert!((m.probability(3.0) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn boundary_score_belongs_to_lower_bin() {
        let m = PropensityMapping::new(vec![0.0], vec![0.2, 0.8]).unwrap();
        assert_eq!(m.probability(0.0), 0.2);
        assert_eq!(m.probability(1e-12), 0.8);
    }

    #[test]
    fn degenerate_score_range_is_rejected() {
        assert!(build_linear_mapping(&[0.3; 5], 4, 0.05, 0.95).is_err());
        assert!(build_quantile_mapping(&[0.3; 5], 4, 0.05, 0.95).is_err());
        assert!(build_linear_mapping(&[0.0, 1.0], 0, 0.05, 0.95).is_err());
        assert!(build_linear_mapping(&[0.0, 1.0], 3, 0.6, 0.4).is_err());
    }

    #[test]
    fn quantile_mapping_balances_bins() {
        let scores: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64).collect();
        let m = build_quantile_mapping(&scores, 10, 0.05, 0.95).unwrap();
        let mut counts = [0usize; 10];
        for &s in &scores {
            counts[m.bin(s)] += 1;
        }
        assert!(counts.iter().all(|&c| (99..=101).contains(&c)), "{counts:?}");
    }

    #[test]
    fn mapping_json_shape() {
        let m = PropensityMapping::new(vec![0.5], vec![0.2, 0.8]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"thresholds":[0.5],"probabilities":[0.2,0.8]}"#);
        let bad = r#"{"thresholds":[0.5,0.1],"probabilities":[0.2,0.5,0.8]}"#;
        assert!(serde_json::from_str::<PropensityMapping>(bad).is_err());
    }

    #[test]
    fn deterministic_policies() {
        let s = [0.04, -1.0, 0.5];
        assert_eq!(deterministic_policy(&s, f64::INFINITY), vec![0, 0, 0]);
        assert_eq!(deterministic_policy(&s, f64::NEG_INFINITY), vec![1, 1, 1]);
        assert_eq!(deterministic_policy(&[0.04], 1.0 / 30.0), vec![1]);
    }

    #[test]
    fn parses_scheme_specs() {
        assert_eq!("full:0.5".parse::<SchemeSpec>().unwrap(), SchemeSpec::full(0.5));
        assert_eq!("full".parse::<SchemeSpec>().unwrap(), SchemeSpec::full(0.5));
        assert_eq!(
            "full:0.666".parse::<SchemeSpec>().unwrap(),
            SchemeSpec::Full {
                name: "full_imb".into(),
                e: 0.666
            }
        );
        match "supervised-width:5".parse::<SchemeSpec>().unwrap() {
            SchemeSpec::Supervised { bins, binning, .. } => {
                assert_eq!(bins, 5);
                assert_eq!(binning, Binning::EqualWidth);
            }
            _ => panic!(),
        }
        assert!("full:1.5".parse::<SchemeSpec>().is_err());
        assert!("bandit".parse::<SchemeSpec>().is_err());
    }
}
