//! Experiment configuration, orchestration and report files.
//!
//! Every run is a pure function of its resolved configuration; reports
//! carry that configuration, so re-running from a report reproduces it.

pub mod config;
pub mod report;
pub mod run;

pub use config::{DictionaryKind, ExperimentConfig, ExperimentKind, OutputFormat};
pub use report::{version_string, Report};
pub use run::{mp_gap_tolerance, run};
