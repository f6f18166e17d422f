//! Batch front end: system descriptions in, reports out.

pub mod config;
pub mod emit;
pub mod pipeline;
pub mod spec;

pub use config::Config;
pub use emit::{emit, Format};
pub use pipeline::{run_pipeline, run_stages, Report, Stages, SCHEMA_VERSION};
pub use spec::{parse_spec, SpecError, SystemSpec};
