//! CSV and JSON-lines persistence.
//!
//! Both CSV files start with a schema comment line followed by a header row.
//! Floats use fixed precision and `inf` marks noiseless cells, so the text is
//! a pure function of the records.

use std::path::Path;

use crate::error::{Error, Result};

use super::{AggregateRow, TrialRecord};

pub const AGGREGATE_SCHEMA: &str = "# phaseprox-aggregate v1";
pub const TRIALS_SCHEMA: &str = "# phaseprox-trials v1";

pub const AGGREGATE_COLUMNS: [&str; 9] = [
    "method",
    "n",
    "K",
    "snr_db",
    "lambda",
    "recovery_probability",
    "median_cpu_seconds",
    "trials",
    "restarts",
];

pub const TRIALS_COLUMNS: [&str; 10] = [
    "method",
    "n",
    "K",
    "snr_db",
    "lambda",
    "trial",
    "recovery",
    "best_residual",
    "best_restart",
    "cpu_seconds",
];

fn fmt_snr(snr: f64) -> String {
    if snr == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{snr:.2}")
    }
}

fn fmt_lambda(lambda: Option<f64>) -> String {
    lambda.map(|l| format!("{l:.4}")).unwrap_or_default()
}

fn finish(mut writer: csv::Writer<Vec<u8>>, schema: &str) -> Result<String> {
    writer.flush().map_err(|e| Error::io("<memory>", e))?;
    let body = writer.into_inner().map_err(|e| Error::io("<memory>", e.into_error()))?;
    let body = String::from_utf8(body).expect("csv output is utf-8");
    Ok(format!("{schema}\n{body}"))
}

pub fn write_aggregate_csv(rows: &[AggregateRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.n.to_string(),
            r.k.to_string(),
            fmt_snr(r.snr_db),
            fmt_lambda(r.lambda),
            format!("{:.6}", r.recovery_probability),
            format!("{:.9}", r.median_cpu_seconds),
            r.trials.to_string(),
            r.restarts.to_string(),
        ])?;
    }
    finish(w, AGGREGATE_SCHEMA)
}

pub fn write_trials_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIALS_COLUMNS)?;
    for r in records {
        w.write_record([
            r.method.clone(),
            r.n.to_string(),
            r.k.to_string(),
            fmt_snr(r.snr_db),
            fmt_lambda(r.lambda),
            r.trial.to_string(),
            r.recovery.to_string(),
            format!("{:.12e}", r.best_residual),
            r.best_restart.to_string(),
            format!("{:.9}", r.cpu_seconds),
        ])?;
    }
    finish(w, TRIALS_SCHEMA)
}

/// One JSON object per line.
pub fn write_trials_jsonl(records: &[TrialRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Parses an aggregate table. `path` is only used in error messages.
pub fn parse_aggregate_csv(text: &str, path: &Path) -> Result<Vec<AggregateRow>> {
    let schema_err = |row: usize, column: &str, message: String| Error::Schema {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message,
    };

    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    if first.trim_end() != AGGREGATE_SCHEMA {
        return Err(schema_err(
            0,
            "-",
            format!(
                "expected schema line `{AGGREGATE_SCHEMA}`, found `{}`",
                first.trim_end()
            ),
        ));
    }

    let mut reader = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let headers = reader.headers()?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != AGGREGATE_COLUMNS {
        return Err(schema_err(
            1,
            "-",
            format!("expected columns {:?}, found {:?}", AGGREGATE_COLUMNS, found),
        ));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // data rows are numbered from 1, after the schema line and header
        let row = i + 1;
        let record = record.map_err(|e| schema_err(row, "-", e.to_string()))?;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let parse_usize = |idx: usize| {
            field(idx)
                .parse::<usize>()
                .map_err(|e| schema_err(row, AGGREGATE_COLUMNS[idx], format!("`{}`: {e}", field(idx))))
        };
        let parse_f64 = |idx: usize| {
            field(idx)
                .parse::<f64>()
                .map_err(|e| schema_err(row, AGGREGATE_COLUMNS[idx], format!("`{}`: {e}", field(idx))))
        };
        let method = field(0).to_string();
        if method.is_empty() {
            return Err(schema_err(row, "method", "empty method label".into()));
        }
        let lambda = if field(4).is_empty() { None } else { Some(parse_f64(4)?) };
        let recovery_probability = parse_f64(5)?;
        if !(0.0..=1.0).contains(&recovery_probability) {
            return Err(schema_err(
                row,
                "recovery_probability",
                format!("{recovery_probability} is outside [0, 1]"),
            ));
        }
        rows.push(AggregateRow {
            method,
            n: parse_usize(1)?,
            k: parse_usize(2)?,
            snr_db: parse_f64(3)?,
            lambda,
            recovery_probability,
            median_cpu_seconds: parse_f64(6)?,
            trials: parse_usize(7)?,
            restarts: parse_usize(8)?,
        });
    }
    if rows.is_empty() {
        return Err(schema_err(1, "-", "aggregate table has no data rows".into()));
    }
    Ok(rows)
}
