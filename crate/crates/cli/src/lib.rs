//! Batch driver: configuration, per-point pipeline, reports and the
//! measurement-plan table.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod plan_table;
pub mod report;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use pipeline::{run_pipeline, CurvePoint, PointOutcome, RunSummary};
