use std::path::PathBuf;

use crate::operator::InvertibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not unitary: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("real part of the Hamiltonian is singular (min |eigenvalue| = {:e}, threshold {:e})", .0.min_abs_eigenvalue, .0.tolerance_used)]
    SingularRealPart(InvertibilityReport),

    #[error("every eigenvalue lies in the removed zero eigenspace")]
    AllZeroSpectrum,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("objects were built from different Hamiltonians (fingerprints {left:016x} and {right:016x})")]
    SystemMismatch { left: u64, right: u64 },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("{}", format_config_error(.line, .message))]
    Config { line: Option<usize>, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_config_error(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("config error at line {line}: {message}"),
        None => format!("config error: {message}"),
    }
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config { line: None, message: message.into() }
    }

    pub(crate) fn config_at(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
