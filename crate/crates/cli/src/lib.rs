//! Library side of the `armad` command: run configuration, the run and sweep
//! pipelines, context converters and exit-code mapping.

pub mod cli;
pub mod config;
pub mod convert;
pub mod exit;
pub mod output;
pub mod pipeline;
pub mod sweep;
