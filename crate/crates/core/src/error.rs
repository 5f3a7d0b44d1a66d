use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("subsystem index {index} out of range for a space with {len} subsystems")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operator is not Hermitian (max |M - M^dag| = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("truncation too small: need at least {required} photons in mode {mode}, space has {available}")]
    TruncationTooSmall {
        mode: usize,
        required: usize,
        available: usize,
    },

    #[error("f = {f} hits an excluded resonance ({detail})")]
    ExcludedResonance { f: f64, detail: String },

    #[error("eliminated block has an eigenvalue {eigenvalue:.6e} within {tolerance:.3e} of E = {energy:.6e}")]
    NearDegenerateElimination {
        energy: f64,
        eigenvalue: f64,
        tolerance: f64,
    },

    #[error("no interior minimum of the tracked gap in [{lo}, {hi}]")]
    NoMinimumInBracket { lo: f64, hi: f64 },

    #[error("tracked gap has {count} local minima in [{lo}, {hi}]")]
    MultipleMinima { lo: f64, hi: f64, count: usize },

    #[error("state is not normalized (norm^2 = {norm_sq:.12})")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    #[error("step size underflow at t = {time:.6e} (h = {step:.3e})")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn file(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter { .. }
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::TruncationTooSmall { .. }
            | Error::ExcludedResonance { .. }
            | Error::NotNormalized { .. }
            | Error::InvalidDensityMatrix { .. }
            | Error::Parse { .. } => ErrorCategory::Validation,
            Error::NotHermitian { .. }
            | Error::NearDegenerateElimination { .. }
            | Error::NoMinimumInBracket { .. }
            | Error::MultipleMinima { .. }
            | Error::StepSizeUnderflow { .. } => ErrorCategory::Numerical,
            Error::Io(_) | Error::File { .. } | Error::Json(_) => ErrorCategory::Io,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse {
                line,
                message: format!("{other:?}"),
            },
        }
    }
}
