use std::path::PathBuf;

use quasikernel::rational::ParseRationalError;

/// Exit status for a run that found oracle discrepancies.
pub const EXIT_DISCREPANCY: i32 = 1;
/// Exit status for violated mathematical preconditions.
pub const EXIT_PRECONDITION: i32 = 2;
/// Exit status for unreadable, malformed or invalid input.
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: at {location}: {source}")]
    Rational {
        path: PathBuf,
        location: String,
        source: ParseRationalError,
    },

    #[error("{path}: at {location}: {source}")]
    Validation {
        path: PathBuf,
        location: String,
        source: quasikernel::Error,
    },

    #[error("{path}: {message}")]
    Model { path: PathBuf, message: String },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("{0}")]
    Core(#[from] quasikernel::Error),

    #[error("oracle found {0} discrepancies")]
    Discrepancy(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use quasikernel::Error as E;
        match self {
            CliError::Discrepancy(_) => EXIT_DISCREPANCY,
            CliError::Core(
                E::Precondition(_)
                | E::NotFull(_)
                | E::NotMember
                | E::NotMeasurableSet(_)
                | E::NotRestriction { .. }
                | E::NotStabilized(_)
                | E::WindowTooLarge { .. }
                | E::DimensionTooLarge { .. },
            ) => EXIT_PRECONDITION,
            _ => EXIT_INPUT,
        }
    }
}
