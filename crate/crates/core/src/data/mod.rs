//! Tabular data: schema, encoded datasets, CSV and cross-validation folds.

mod csv_io;
mod dataset;
mod schema;

pub use csv_io::{
    format_real, ingest_csv, write_csv, write_csv_to, COL_ITE, COL_OUTCOME, COL_PROPENSITY,
    COL_TREATMENT, COL_Y0, COL_Y1,
};
pub use dataset::{Dataset, Truth, UNASSIGNED_PROPENSITY};
pub use schema::{one_hot_encode, Cell, Column, ColumnKind, FeatureSchema};

use rand::seq::SliceRandom;

use crate::error::{invalid, Result};
use crate::rng::{domain, StreamKey};

/// Random partition of `0..n` into `k` folds whose sizes differ by at most one.
/// Each fold is returned sorted.
pub fn split_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > n {
        return Err(invalid(format!("cannot split {n} rows into {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = StreamKey::new(seed, domain::FOLDS, 0).rng(0);
    order.shuffle(&mut rng);
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, row) in order.into_iter().enumerate() {
        folds[pos % k].push(row);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}
