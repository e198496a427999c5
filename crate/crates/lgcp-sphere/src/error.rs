use thiserror::Error;

/// Errors produced by simulation, estimation, and IO routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Model parameters fall outside the valid range for the family.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The Gram matrix is too far from positive semidefinite to factor.
    #[error(
        "covariance factorization rejected: clamped eigenvalue mass {clamped:.6e} \
         exceeds 10% of trace {trace:.6e}"
    )]
    IndefiniteCovariance { clamped: f64, trace: f64 },

    /// A log-intensity value would overflow `exp`.
    #[error("log-intensity {max_log:.3} exceeds the overflow guard of 700")]
    IntensityOverflow { max_log: f64 },

    /// A curve has missing (NaN) values where finite ones are required.
    #[error("missing values: {0}")]
    MissingValues(String),

    /// Too few simulated curves for the requested envelope level.
    #[error("too few simulations: {0}; increase simulations")]
    TooFewSimulations(String),

    /// A text input failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// The linear algebra backend reported a failure.
    #[error("linear algebra backend: {0}")]
    Linalg(String),
}

impl Error {
    /// Stable machine-readable code, one per variant, used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "E_ARGUMENT",
            Error::InvalidModel(_) => "E_MODEL",
            Error::IndefiniteCovariance { .. } => "E_INDEFINITE",
            Error::IntensityOverflow { .. } => "E_OVERFLOW",
            Error::MissingValues(_) => "E_MISSING",
            Error::TooFewSimulations(_) => "E_TOO_FEW_SIMS",
            Error::Parse { .. } => "E_PARSE",
            Error::Io(_) => "E_IO",
            Error::Linalg(_) => "E_LINALG",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
