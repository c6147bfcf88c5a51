//! Experiment reports and their JSON / CSV renderings.
//!
//! JSON output is canonical: object keys are sorted and numbers use the
//! shortest round-trip form. The only run-dependent field is
//! `provenance.created_unix`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// One measurement. Curves set `x` (component count or rank).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub series: String,
    pub key: String,
    #[serde(default)]
    pub x: Option<f64>,
    pub value: f64,
}

impl ResultRow {
    pub fn new(series: impl Into<String>, key: impl Into<String>, value: f64) -> Self {
        ResultRow { series: series.into(), key: key.into(), x: None, value }
    }

    pub fn point(series: impl Into<String>, key: impl Into<String>, x: f64, value: f64) -> Self {
        ResultRow { series: series.into(), key: key.into(), x: Some(x), value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch when the report was produced.
    pub created_unix: u64,
    /// Input path → SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    pub fn now() -> Self {
        Provenance {
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            ..Provenance::default()
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), file_digest(path)?);
        Ok(())
    }
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            created_unix: 0,
            inputs: BTreeMap::new(),
        }
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub experiment: String,
    pub embedding: String,
    /// Effective configuration of the run.
    pub config: serde_json::Value,
    pub results: Vec<ResultRow>,
    pub provenance: Provenance,
}

impl EvalReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        EvalReport {
            experiment: experiment.into(),
            embedding: String::new(),
            config: serde_json::Value::Object(Default::default()),
            results: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn push(&mut self, row: ResultRow) {
        self.results.push(row);
    }

    /// Rows of one series, in report order.
    pub fn series<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.results.iter().filter(move |r| r.series == name)
    }

    /// Value of the first row matching `series` and `key`.
    pub fn value(&self, series: &str, key: &str) -> Option<f64> {
        self.results.iter().find(|r| r.series == series && r.key == key).map(|r| r.value)
    }

    pub fn to_json(&self) -> Result<String> {
        // round-tripping through Value sorts every object's keys
        let value = serde_json::to_value(self)?;
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    /// `series,key,x,y` with one row per result.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "key", "x", "y"])?;
        for r in &self.results {
            let x = r.x.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([r.series.as_str(), r.key.as_str(), x.as_str(), r.value.to_string().as_str()])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
