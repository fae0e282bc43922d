//! Monte Carlo study driver: configuration, the repetition loop and the
//! report files.

mod config;
mod run;

pub use config::{DataSource, ExperimentConfig, ModelKind, TauConfig, ATE_REFERENCE};
pub use run::{
    aggregate, build_ground_truth, run_experiment, run_repetitions, AteRecord, GroundTruthSummary, KruskalReport,
    LeveneReport, ModelOutcome, ModelReport, PolicyReport, ProfitCell, RunReport, SchemeOutcome, SchemeReport,
    Seeds, Summary, TestReport,
};

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::data::format_real;
use crate::error::{Error, Result};

pub const REPORT_FILES: [&str; 7] = [
    "table2.csv",
    "table3.csv",
    "table4.csv",
    "table5.csv",
    "ate_estimates.csv",
    "report.json",
    "config.json",
];

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Write the tables, `report.json` and the resolved `config.json` into `dir`.
/// Output depends only on the report, so equal reports give identical files.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut t2 = csv_writer(dir, "table2.csv")?;
    t2.write_record(["scheme", "targeted_fraction", "conversion_rate"])?;
    for p in &report.policies {
        t2.write_record([p.name.clone(), format_real(p.targeted_fraction), format_real(p.conversion_rate)])?;
    }
    for s in &report.schemes {
        t2.write_record([
            s.name.clone(),
            format_real(s.targeted_fraction.mean),
            format_real(s.conversion_rate.mean),
        ])?;
    }
    t2.flush().map_err(|e| Error::io(dir.join("table2.csv"), e))?;

    let mut t3 = csv_writer(dir, "table3.csv")?;
    t3.write_record(["scheme", "model", "mae", "qini"])?;
    for m in &report.models {
        let qini = m.qini.map_or_else(|| "-".to_owned(), |q| format_real(q.mean));
        t3.write_record([m.scheme.clone(), m.model.clone(), format_real(m.mae.mean), qini])?;
    }
    t3.flush().map_err(|e| Error::io(dir.join("table3.csv"), e))?;

    let mut t4 = csv_writer(dir, "table4.csv")?;
    t4.write_record(["V", "scheme", "profit"])?;
    for (k, &v) in report.config.profit_grid.iter().enumerate() {
        for p in &report.policies {
            t4.write_record([format_real(v), p.name.clone(), format_real(p.profit[k].1)])?;
        }
        for s in &report.schemes {
            t4.write_record([format_real(v), s.name.clone(), format_real(s.experiment_profit[k].profit.mean)])?;
        }
    }
    t4.flush().map_err(|e| Error::io(dir.join("table4.csv"), e))?;

    let mut t5 = csv_writer(dir, "table5.csv")?;
    t5.write_record(["V", "model", "scheme", "profit"])?;
    for (k, &v) in report.config.profit_grid.iter().enumerate() {
        for m in &report.models {
            t5.write_record([
                format_real(v),
                m.model.clone(),
                m.scheme.clone(),
                format_real(m.policy_profit[k].profit.mean),
            ])?;
        }
    }
    t5.flush().map_err(|e| Error::io(dir.join("table5.csv"), e))?;

    let mut ate = csv_writer(dir, "ate_estimates.csv")?;
    ate.write_record(["scheme", "method", "repetition", "value"])?;
    for r in &report.ate_estimates {
        ate.write_record([
            r.scheme.clone(),
            r.method.as_str().to_owned(),
            r.repetition.to_string(),
            format_real(r.value),
        ])?;
    }
    ate.flush().map_err(|e| Error::io(dir.join("ate_estimates.csv"), e))?;

    write_json(dir, "report.json", report)?;
    write_json(dir, "config.json", &report.config)
}

/// Wall-clock record of a run, kept apart from the deterministic report.
#[derive(Debug, Clone, Serialize)]
pub struct RunLog {
    pub config_hash: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub elapsed_ms: u128,
    pub threads: usize,
}

pub fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn write_run_log(log: &RunLog, dir: &Path) -> Result<()> {
    write_json(dir, "run_log.json", log)
}
