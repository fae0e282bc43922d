//! CSV ingestion and emission.
//!
//! Emitted files carry the schema columns (categoricals decoded back to their
//! level names) followed by the reserved columns `__treatment`, `__outcome`,
//! `__propensity` and, when ground truth exists, `__ite_true`, `__y1`, `__y0`.
//! Reals are written with 17 significant digits so that a re-ingested file
//! reproduces the dataset bit for bit.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;

use super::dataset::{Dataset, Truth, UNASSIGNED_PROPENSITY};
use super::schema::{ColumnKind, FeatureSchema};
use crate::error::{Error, Result};

pub const COL_TREATMENT: &str = "__treatment";
pub const COL_OUTCOME: &str = "__outcome";
pub const COL_PROPENSITY: &str = "__propensity";
pub const COL_ITE: &str = "__ite_true";
pub const COL_Y1: &str = "__y1";
pub const COL_Y0: &str = "__y0";

const RESERVED: [&str; 6] = [
    COL_TREATMENT,
    COL_OUTCOME,
    COL_PROPENSITY,
    COL_ITE,
    COL_Y1,
    COL_Y0,
];

/// Lossless decimal rendering (17 significant digits).
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn sniff_delimiter(path: &Path) -> Result<u8> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut first = String::new();
    BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| Error::io(path, e))?;
    // The public bank-marketing export uses semicolons.
    Ok(if first.contains(';') && !first.contains(',') {
        b';'
    } else {
        b','
    })
}

fn parse_binary(raw: &str) -> Option<u8> {
    match raw.trim() {
        "1" | "yes" => Some(1),
        "0" | "no" => Some(0),
        _ => None,
    }
}

/// Read a CSV into a dataset.
///
/// The header must contain every schema column and `target_column`; the only
/// other columns allowed are the reserved `__*` ones. Files written by
/// [`write_csv`] carry the outcome as `__outcome`, which stands in for a
/// missing target column. Without reserved
/// assignment columns every row is unassigned (control, propensity 0.5).
pub fn ingest_csv(path: &Path, schema: &FeatureSchema, target_column: &str) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    let delimiter = sniff_delimiter(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_path(path)?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();

    let mut position: HashMap<&str, usize> = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        if position.insert(h.as_str(), i).is_some() {
            return Err(Error::Header(format!("duplicate column `{h}`")));
        }
    }
    for h in &header {
        let known = schema.column(h).is_some() || h == target_column || RESERVED.contains(&h.as_str());
        if !known {
            return Err(Error::Header(format!("unexpected column `{h}`")));
        }
    }
    let mut feature_pos = Vec::with_capacity(schema.columns().len());
    for col in schema.columns() {
        let p = position
            .get(col.name.as_str())
            .ok_or_else(|| Error::Header(format!("missing schema column `{}`", col.name)))?;
        feature_pos.push(*p);
    }
    let target_pos = *position
        .get(target_column)
        .or_else(|| position.get(COL_OUTCOME))
        .ok_or_else(|| Error::Header(format!("missing target column `{target_column}`")))?;
    let treat_pos = position.get(COL_TREATMENT).copied();
    let prop_pos = position.get(COL_PROPENSITY).copied();
    if treat_pos.is_some() != prop_pos.is_some() {
        return Err(Error::Header(format!(
            "`{COL_TREATMENT}` and `{COL_PROPENSITY}` must appear together"
        )));
    }
    let truth_pos = [COL_ITE, COL_Y1, COL_Y0].map(|c| position.get(c).copied());
    let has_truth = truth_pos.iter().all(Option::is_some);
    if !has_truth && truth_pos.iter().any(Option::is_some) {
        return Err(Error::Header(format!(
            "`{COL_ITE}`, `{COL_Y1}` and `{COL_Y0}` must appear together"
        )));
    }

    let d = schema.encoded_width();
    let mut values = Vec::new();
    let mut outcome = Vec::new();
    let mut treatment = Vec::new();
    let mut propensity = Vec::new();
    let (mut ite, mut y1, mut y0) = (Vec::new(), Vec::new(), Vec::new());

    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let cell = |p: usize| record.get(p).unwrap_or("").trim();
        let cell_err = |name: &str, message: String| Error::Cell {
            row,
            column: name.to_owned(),
            message,
        };
        let real = |p: usize, name: &str| -> Result<f64> {
            let raw = cell(p);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| cell_err(name, format!("cannot parse `{raw}` as a number")))
        };
        let binary = |p: usize, name: &str| -> Result<u8> {
            let raw = cell(p);
            parse_binary(raw).ok_or_else(|| cell_err(name, format!("`{raw}` is not a binary value")))
        };

        for (col, &p) in schema.columns().iter().zip(&feature_pos) {
            match &col.kind {
                ColumnKind::Numeric => values.push(real(p, &col.name)?),
                ColumnKind::Categorical { levels } => {
                    let raw = cell(p);
                    let k = levels.iter().position(|l| l == raw).ok_or_else(|| {
                        cell_err(&col.name, format!("level `{raw}` is not in the schema"))
                    })?;
                    values.extend((0..levels.len()).map(|j| if j == k { 1.0 } else { 0.0 }));
                }
            }
        }
        outcome.push(binary(target_pos, target_column)?);
        if let (Some(tp), Some(pp)) = (treat_pos, prop_pos) {
            let raw = cell(tp);
            let t: u8 = raw
                .parse()
                .map_err(|_| cell_err(COL_TREATMENT, format!("`{raw}` is not a treatment arm")))?;
            treatment.push(t);
            propensity.push(real(pp, COL_PROPENSITY)?);
        } else {
            treatment.push(0);
            propensity.push(UNASSIGNED_PROPENSITY);
        }
        if let [Some(ip), Some(p1), Some(p0)] = truth_pos {
            ite.push(real(ip, COL_ITE)?);
            y1.push(binary(p1, COL_Y1)?);
            y0.push(binary(p0, COL_Y0)?);
        }
    }
    let n = outcome.len();
    let x = Array2::from_shape_vec((n, d), values)
        .map_err(|e| Error::Dataset(format!("matrix shape: {e}")))?;
    let truth = has_truth.then_some(Truth { ite, y1, y0 });
    Dataset::new(
        Arc::new(schema.clone()),
        x,
        treatment,
        outcome,
        propensity,
        truth,
    )
}

/// Write a dataset in the emitted CSV layout.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_csv_to(ds, &mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_csv_to<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let schema = ds.schema();
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let mut header: Vec<&str> = schema.columns().iter().map(|c| c.name.as_str()).collect();
    header.extend([COL_TREATMENT, COL_OUTCOME, COL_PROPENSITY]);
    if ds.truth().is_some() {
        header.extend([COL_ITE, COL_Y1, COL_Y0]);
    }
    w.write_record(&header)?;

    let offsets = schema.offsets();
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..ds.n() {
        record.clear();
        let row = ds.row(i);
        for (col, &o) in schema.columns().iter().zip(&offsets) {
            match &col.kind {
                ColumnKind::Numeric => record.push(format_real(row[o])),
                ColumnKind::Categorical { levels } => {
                    let k = (0..levels.len()).find(|&j| row[o + j] == 1.0).ok_or_else(|| {
                        Error::Dataset(format!("row {i}: column `{}` has no active level", col.name))
                    })?;
                    record.push(levels[k].clone());
                }
            }
        }
        record.push(ds.treatment()[i].to_string());
        record.push(ds.outcome()[i].to_string());
        record.push(format_real(ds.propensity()[i]));
        if let Some(t) = ds.truth() {
            record.push(format_real(t.ite[i]));
            record.push(t.y1[i].to_string());
            record.push(t.y0[i].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
