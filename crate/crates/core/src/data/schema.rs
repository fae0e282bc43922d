use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column type. Categorical columns are one-hot encoded in level order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
    /// Whether learners may see this column.
    #[serde(default = "default_observed")]
    pub observed: bool,
}

fn default_observed() -> bool {
    true
}

impl Column {
    pub fn numeric(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            kind: ColumnKind::Numeric,
            observed: true,
        }
    }

    pub fn categorical(name: &str, levels: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            kind: ColumnKind::Categorical {
                levels: levels.iter().map(|s| (*s).to_owned()).collect(),
            },
            observed: true,
        }
    }

    pub fn hidden(mut self) -> Self {
        self.observed = false;
        self
    }

    /// Number of encoded columns this column expands to.
    pub fn width(&self) -> usize {
        match &self.kind {
            ColumnKind::Numeric => 1,
            ColumnKind::Categorical { levels } => levels.len(),
        }
    }
}

/// Ordered column list plus the observed/unobserved split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct FeatureSchema {
    columns: Vec<Column>,
}

#[derive(Deserialize)]
struct RawSchema {
    columns: Vec<Column>,
}

impl TryFrom<RawSchema> for FeatureSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        FeatureSchema::new(raw.columns)
    }
}

impl FeatureSchema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Schema("schema has no columns".into()));
        }
        let mut seen = HashSet::new();
        for col in &columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", col.name)));
            }
            if col.name.starts_with("__") {
                return Err(Error::Schema(format!(
                    "column `{}` uses the reserved `__` prefix",
                    col.name
                )));
            }
            if let ColumnKind::Categorical { levels } = &col.kind {
                if levels.is_empty() {
                    return Err(Error::Schema(format!("column `{}` has no levels", col.name)));
                }
                let mut lv = HashSet::new();
                for l in levels {
                    if !lv.insert(l.as_str()) {
                        return Err(Error::Schema(format!(
                            "column `{}` repeats level `{l}`",
                            col.name
                        )));
                    }
                }
            }
        }
        if !columns.iter().any(|c| c.observed) {
            return Err(Error::Schema("no column is observed".into()));
        }
        Ok(Self { columns })
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<(usize, &Column)> {
        self.columns.iter().enumerate().find(|(_, c)| c.name == name)
    }

    /// Total encoded width `d`.
    pub fn encoded_width(&self) -> usize {
        self.columns.iter().map(Column::width).sum()
    }

    /// Start offset of each column in the encoded row.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.columns
            .iter()
            .map(|c| {
                let o = off;
                off += c.width();
                o
            })
            .collect()
    }

    /// Encoded indices belonging to the named columns, in schema order.
    pub fn encoded_indices(&self, names: &[String]) -> Result<Vec<usize>> {
        for n in names {
            if self.column(n).is_none() {
                return Err(Error::Schema(format!("unknown column `{n}`")));
            }
        }
        let offsets = self.offsets();
        Ok(self
            .columns
            .iter()
            .zip(offsets)
            .filter(|(c, _)| names.iter().any(|n| n == &c.name))
            .flat_map(|(c, o)| o..o + c.width())
            .collect())
    }

    /// Encoded indices visible to learners.
    pub fn observed_indices(&self) -> Vec<usize> {
        let offsets = self.offsets();
        self.columns
            .iter()
            .zip(offsets)
            .filter(|(c, _)| c.observed)
            .flat_map(|(c, o)| o..o + c.width())
            .collect()
    }

    /// Human-readable names of the encoded columns (`job=admin` for one-hot).
    pub fn encoded_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| match &c.kind {
                ColumnKind::Numeric => vec![c.name.clone()],
                ColumnKind::Categorical { levels } => {
                    levels.iter().map(|l| format!("{}={l}", c.name)).collect()
                }
            })
            .collect()
    }
}

/// One raw cell before encoding.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell<'a> {
    Number(f64),
    Text(&'a str),
}

/// Encode one raw row: numeric cells are copied, categorical cells expand to
/// one indicator per level.
pub fn one_hot_encode(schema: &FeatureSchema, raw_row: &[Cell<'_>]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(schema.encoded_width());
    encode_into(schema, raw_row, &mut out)?;
    Ok(out)
}

pub(crate) fn encode_into(
    schema: &FeatureSchema,
    raw_row: &[Cell<'_>],
    out: &mut Vec<f64>,
) -> Result<()> {
    if raw_row.len() != schema.columns.len() {
        return Err(Error::InvalidArgument(format!(
            "row has {} cells, schema has {} columns",
            raw_row.len(),
            schema.columns.len()
        )));
    }
    for (col, cell) in schema.columns.iter().zip(raw_row) {
        match (&col.kind, cell) {
            (ColumnKind::Numeric, Cell::Number(v)) => out.push(*v),
            (ColumnKind::Numeric, Cell::Text(s)) => {
                let v: f64 = s.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("`{s}` is not numeric in column `{}`", col.name))
                })?;
                out.push(v);
            }
            (ColumnKind::Categorical { levels }, Cell::Text(s)) => {
                let pos = levels.iter().position(|l| l == s).ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown level `{s}` in column `{}`", col.name))
                })?;
                out.extend((0..levels.len()).map(|j| if j == pos { 1.0 } else { 0.0 }));
            }
            (ColumnKind::Categorical { .. }, Cell::Number(v)) => {
                return Err(Error::InvalidArgument(format!(
                    "numeric value {v} given for categorical column `{}`",
                    col.name
                )))
            }
        }
    }
    Ok(())
}
