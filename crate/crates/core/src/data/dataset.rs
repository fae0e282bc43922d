use std::sync::Arc;

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use super::schema::FeatureSchema;
use crate::error::{Error, Result};

/// Placeholder propensity carried by data that has not been through assignment.
pub const UNASSIGNED_PROPENSITY: f64 = 0.5;

/// Simulation ground truth for each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    /// Conditional treatment effect actually implanted for the row.
    pub ite: Vec<f64>,
    pub y1: Vec<u8>,
    pub y0: Vec<u8>,
}

impl Truth {
    pub fn len(&self) -> usize {
        self.ite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ite.is_empty()
    }

    fn subset(&self, rows: &[usize]) -> Truth {
        Truth {
            ite: rows.iter().map(|&i| self.ite[i]).collect(),
            y1: rows.iter().map(|&i| self.y1[i]).collect(),
            y0: rows.iter().map(|&i| self.y0[i]).collect(),
        }
    }
}

/// Encoded covariates plus treatment, outcome and logged propensity.
///
/// `propensity[i]` is the probability with which row `i` was assigned to
/// treatment, whatever arm it ended up in; the control-arm weight is
/// `1 - propensity[i]`. Immutable once built: every transformation returns a
/// new dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Arc<FeatureSchema>,
    x: Array2<f64>,
    row_ids: Vec<u64>,
    treatment: Vec<u8>,
    outcome: Vec<u8>,
    propensity: Vec<f64>,
    truth: Option<Truth>,
}

impl Dataset {
    pub fn new(
        schema: Arc<FeatureSchema>,
        x: Array2<f64>,
        treatment: Vec<u8>,
        outcome: Vec<u8>,
        propensity: Vec<f64>,
        truth: Option<Truth>,
    ) -> Result<Self> {
        let n = x.nrows();
        let ds = Self {
            schema,
            x,
            row_ids: (0..n as u64).collect(),
            treatment,
            outcome,
            propensity,
            truth,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Data with nothing assigned yet: every row in control at the placeholder
    /// propensity.
    pub fn unassigned(schema: Arc<FeatureSchema>, x: Array2<f64>, outcome: Vec<u8>) -> Result<Self> {
        let n = x.nrows();
        Self::new(
            schema,
            x,
            vec![0; n],
            outcome,
            vec![UNASSIGNED_PROPENSITY; n],
            None,
        )
    }

    fn validate(&self) -> Result<()> {
        let n = self.x.nrows();
        if self.x.ncols() != self.schema.encoded_width() {
            return Err(Error::Dataset(format!(
                "matrix has {} columns, schema encodes {}",
                self.x.ncols(),
                self.schema.encoded_width()
            )));
        }
        for (name, len) in [
            ("treatment", self.treatment.len()),
            ("outcome", self.outcome.len()),
            ("propensity", self.propensity.len()),
            ("row ids", self.row_ids.len()),
        ] {
            if len != n {
                return Err(Error::Dataset(format!("{name} has {len} entries, expected {n}")));
            }
        }
        if let Some((i, _)) = self.x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Dataset(format!(
                "non-finite covariate at row {}",
                i / self.x.ncols().max(1)
            )));
        }
        if let Some(i) = self.outcome.iter().position(|&y| y > 1) {
            return Err(Error::Dataset(format!("outcome at row {i} is not binary")));
        }
        if let Some(i) = self
            .propensity
            .iter()
            .position(|&e| !(e > 0.0 && e < 1.0))
        {
            return Err(Error::Dataset(format!(
                "propensity {} at row {i} is outside (0, 1)",
                self.propensity[i]
            )));
        }
        if let Some(t) = &self.truth {
            if t.ite.len() != n || t.y1.len() != n || t.y0.len() != n {
                return Err(Error::Dataset("truth length does not match row count".into()));
            }
            if let Some(i) = t.ite.iter().position(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!("non-finite true effect at row {i}")));
            }
            for i in 0..n {
                if t.y1[i] > 1 || t.y0[i] > 1 {
                    return Err(Error::Dataset(format!("potential outcome at row {i} is not binary")));
                }
                let expected = if self.treatment[i] > 0 { t.y1[i] } else { t.y0[i] };
                if self.outcome[i] != expected {
                    return Err(Error::Dataset(format!(
                        "outcome at row {i} disagrees with its potential outcome"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> Arc<FeatureSchema> {
        Arc::clone(&self.schema)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.x.row(i)
    }

    /// Position of each row in the dataset it was originally built as. Random
    /// streams are keyed by these ids so subsets stay coupled to the full data.
    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    pub fn treatment(&self) -> &[u8] {
        &self.treatment
    }

    pub fn outcome(&self) -> &[u8] {
        &self.outcome
    }

    pub fn propensity(&self) -> &[f64] {
        &self.propensity
    }

    pub fn truth(&self) -> Option<&Truth> {
        self.truth.as_ref()
    }

    pub fn require_truth(&self) -> Result<&Truth> {
        self.truth
            .as_ref()
            .ok_or_else(|| Error::Dataset("ground truth is required but absent".into()))
    }

    /// Mean implanted effect, when truth is present.
    pub fn true_ate(&self) -> Option<f64> {
        self.truth
            .as_ref()
            .filter(|t| !t.is_empty())
            .map(|t| t.ite.iter().sum::<f64>() / t.len() as f64)
    }

    pub fn treated_count(&self) -> usize {
        self.treatment.iter().filter(|&&d| d > 0).count()
    }

    /// Rows `rows`, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            x: self.x.select(Axis(0), rows),
            row_ids: rows.iter().map(|&i| self.row_ids[i]).collect(),
            treatment: rows.iter().map(|&i| self.treatment[i]).collect(),
            outcome: rows.iter().map(|&i| self.outcome[i]).collect(),
            propensity: rows.iter().map(|&i| self.propensity[i]).collect(),
            truth: self.truth.as_ref().map(|t| t.subset(rows)),
        }
    }

    /// Attach ground truth. Observed outcomes are re-derived from the potential
    /// outcomes and the current treatment.
    pub fn with_truth(&self, truth: Truth) -> Result<Dataset> {
        let outcome = self
            .treatment
            .iter()
            .enumerate()
            .map(|(i, &d)| if d > 0 { truth.y1.get(i).copied().unwrap_or(0) } else { truth.y0.get(i).copied().unwrap_or(0) })
            .collect();
        let ds = Dataset {
            outcome,
            truth: Some(truth),
            ..self.clone()
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Replace the assignment and realize outcomes from the ground truth.
    pub fn with_assignment(&self, treatment: Vec<u8>, propensity: Vec<f64>) -> Result<Dataset> {
        let truth = self.require_truth()?;
        if treatment.len() != self.n() {
            return Err(Error::Dataset("assignment length does not match row count".into()));
        }
        let outcome = treatment
            .iter()
            .enumerate()
            .map(|(i, &d)| if d > 0 { truth.y1[i] } else { truth.y0[i] })
            .collect();
        let ds = Dataset {
            treatment,
            outcome,
            propensity,
            ..self.clone()
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Encoded columns visible to learners.
    pub fn observed_indices(&self) -> Vec<usize> {
        self.schema.observed_indices()
    }
}
