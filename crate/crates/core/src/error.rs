use thiserror::Error;

use crate::source::SourceKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("operation requires a {expected} source, got {got}")]
    UnsupportedKind { expected: SourceKind, got: SourceKind },

    #[error("time {t} fs lies beyond the density-matrix timeline (ends at {end} fs)")]
    TimelineOutOfRange { t: f64, end: f64 },

    #[error("quadrature did not converge: coarse {coarse}, fine {fine} (relative drift {drift:.3e})")]
    NotConverged {
        coarse: num_complex::Complex64,
        fine: num_complex::Complex64,
        drift: f64,
    },

    #[error("at grid point (omega_minus = {omega_minus} eV, T = {time} fs): {source}")]
    AtGridPoint {
        omega_minus: f64,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config [{section}] {key}: {message}")]
    Config {
        section: String,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(section: &str, key: &str, message: impl Into<String>) -> Self {
        Error::Config {
            section: section.to_string(),
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Innermost error, skipping grid-coordinate wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
