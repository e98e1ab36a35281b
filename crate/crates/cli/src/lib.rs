//! Scenario-driven front end for `ntlim-core`.
//!
//! A scenario names a measure, a kernel and one task. [`run::run`] executes
//! it into a [`run::ReportBundle`] and [`report::emit_reports`] writes a
//! canonical JSON record, CSV tables and an SVG plot.

pub mod canonical;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;
pub mod run;

pub use config::Scenario;
pub use error::CliError;
pub use report::emit_reports;
pub use run::{run, run_scenario, Completion, Overrides, ReportBundle, TaskResult};
