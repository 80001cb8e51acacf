//! CSV and JSON artifacts. Numbers go out with 12 significant digits.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use spectrace_core::{Complex64, TraceEvent};

use crate::config::JobConfig;
use crate::CliError;

pub fn num(x: f64) -> String {
    // no "-0" in the output
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn cnum(z: Complex64) -> String {
    format!("({}, {})", num(z.re), num(z.im))
}

/// `x` rounded to 12 significant digits.
pub fn round(x: f64) -> f64 {
    if x.is_finite() {
        num(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

pub fn jpair(z: Complex64) -> Value {
    json!([round(z.re), round(z.im)])
}

fn file(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

pub struct Csv {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Csv {
    pub fn create(prefix: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = file(prefix, ".csv");
        let mut writer = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
        writer.write_record(header).map_err(|e| csv_error(&path, e))?;
        Ok(Self { path, writer })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields).map_err(|e| csv_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn trace_event(e: &TraceEvent) -> Value {
    let mut v = json!({
        "t": round(e.t),
        "kind": e.kind.as_str(),
        "detail": e.detail,
    });
    if let Some(c) = &e.collision {
        v["collision"] = json!({
            "z": jpair(c.z),
            "lambda": jpair(c.lambda),
            "branches": [jpair(c.branches[0]), jpair(c.branches[1])],
            "chosen": c.chosen,
            "norm_integral": c.norm_integral.map(jpair),
        });
    }
    v
}

/// The status line comes last so a reader can tell a finished file from a torn one.
pub fn write_events(prefix: &str, events: Vec<Value>, status: &str) -> Result<(), CliError> {
    let mut map = serde_json::Map::new();
    map.insert("events".into(), Value::Array(events));
    map.insert("status".into(), Value::String(status.into()));
    write_json(&file(prefix, ".events.json"), &Value::Object(map))
}

/// `config` keeps full precision: feeding the report back reproduces the run.
pub fn write_report(prefix: &str, config: &JobConfig, summary: Value) -> Result<(), CliError> {
    let report = json!({
        "config": config,
        "summary": summary,
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&file(prefix, ".report.json"), &report)
}
