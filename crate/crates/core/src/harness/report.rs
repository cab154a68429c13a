use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, OutputFormat};
use crate::error::{Error, Result};
use crate::fit::FitResult;

/// Version string stamped into reports.
pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// Tabular result of one run plus the metadata needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: ExperimentKind,
    pub version: String,
    pub seed: u64,
    /// The resolved configuration (defaults filled in).
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    /// `None` marks a cell with no value (e.g. no packing lower bound).
    pub rows: Vec<Vec<Option<f64>>>,
    pub fit: Option<FitResult>,
    /// Scalar results keyed by name.
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Failed properties; a non-empty list means the run found a violation.
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(config: ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            experiment: config.experiment.expect("resolved config"),
            version: version_string(),
            seed: config.seed.expect("resolved config"),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fit: None,
            summary: BTreeMap::new(),
            notes: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(|x| format!("{x}")).unwrap_or_default()))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serde(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serde(e.to_string()))
    }

    /// Parses the CSV emitted by [`Report::to_csv`] back into columns and rows.
    pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>().map(Some).map_err(|e| Error::Serde(format!("cell `{c}`: {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok((columns, rows))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Human-readable digest.
    pub fn summary_text(&self) -> String {
        let mut s = format!("experiment {}  seed {}  {}\n", self.experiment.name(), self.seed, self.version);
        for (k, v) in &self.summary {
            s.push_str(&format!("  {k:<18} {v:.6e}\n"));
        }
        if let Some(f) = &self.fit {
            s.push_str(&format!(
                "  fit {:?}: exponent {:.4}, constant {:.4}, residual rms {:.3e}, index [{}, {}], {} points\n",
                f.model, f.exponent, f.constant, f.residual_rms, f.index_min, f.index_max, f.points
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s.push_str(&format!("  rows: {}\n", self.rows.len()));
        if self.violations.is_empty() {
            s.push_str("  status: ok\n");
        } else {
            for v in &self.violations {
                s.push_str(&format!("  VIOLATION: {v}\n"));
            }
        }
        s
    }

    /// Writes the data file at `path` in `format` and the summary next to it
    /// (`<path>.summary.txt`). Returns the paths written.
    pub fn write(&self, path: impl AsRef<Path>, format: OutputFormat) -> Result<Vec<PathBuf>> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let data = match format {
            OutputFormat::Csv => self.to_csv()?,
            OutputFormat::Json => self.to_json()?,
        };
        std::fs::write(path, data)?;
        let mut summary = path.as_os_str().to_owned();
        summary.push(".summary.txt");
        let summary = PathBuf::from(summary);
        std::fs::write(&summary, self.summary_text())?;
        Ok(vec![path.to_path_buf(), summary])
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serde(e.to_string())
}
