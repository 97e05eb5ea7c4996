//! Experiment harness, file formats and command-line front end for `carleson-core`.

pub mod config;
pub mod error;
pub mod families;
pub mod formats;
pub mod harness;
pub mod report;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use report::ExperimentReport;
