//! Process exit codes.

use armad_core::Error;

pub const OK: u8 = 0;
pub const VALIDATION: u8 = 2;
pub const IO: u8 = 3;
pub const UNDEFINED_METRIC: u8 = 4;
/// Anything not classified below; should not happen.
pub const OTHER: u8 = 1;

fn core_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => IO,
        Error::Csv(c) if c.is_io_error() => IO,
        Error::UndefinedMetric(_) | Error::UndefinedWeight { .. } => UNDEFINED_METRIC,
        _ => VALIDATION,
    }
}

/// The innermost recognised cause decides the code.
pub fn code_for(err: &anyhow::Error) -> u8 {
    let mut code = OTHER;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            code = core_code(e);
        } else if cause.downcast_ref::<std::io::Error>().is_some() {
            code = IO;
        } else if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            code = if e.is_io() { IO } else { VALIDATION };
        } else if let Some(e) = cause.downcast_ref::<csv::Error>() {
            code = if e.is_io_error() { IO } else { VALIDATION };
        }
    }
    code
}
