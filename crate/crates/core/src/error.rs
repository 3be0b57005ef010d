use std::io;

use thiserror::Error;

use crate::rules::RuleKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("context is empty")]
    EmptyContext,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("confidence undefined: antecedent {0} has zero support")]
    UndefinedConfidence(String),

    #[error("rule weight undefined in literal interest mode (lift = {lift})")]
    UndefinedWeight { lift: f64 },

    #[error("rule kind mismatch: expected a {expected} rule")]
    KindMismatch { expected: RuleKind },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
