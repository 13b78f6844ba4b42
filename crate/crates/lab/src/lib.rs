//! Experiment harness around `cusp-core`: configuration, parallel runs over
//! sampled points, pooled reports and CSV output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{Command, ExperimentConfig, Tolerances};
pub use error::LabError;
pub use experiment::{run, Check, LoglawBand, Outcome, ReportBundle, Table};
