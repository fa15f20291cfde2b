use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed document, bad parameter or index.
    Input,
    /// The physics is ill-posed: zero or unstable modes.
    Physical,
    /// Eigensolver failure or an unphysical covariance.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },

    #[error("{path}: potential not symmetric (|V[{row}][{col}] - V[{col}][{row}]| = {diff:e})")]
    PotentialNotSymmetric {
        path: String,
        row: usize,
        col: usize,
        diff: f64,
    },

    #[error("{path}: mass must be positive and finite, got {value}")]
    InvalidMass { path: String, value: f64 },

    #[error("{path}: expected {expected} entries, found {found}")]
    DimensionMismatch {
        path: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("sites must be distinct, got {0} twice")]
    SameSite(usize),

    #[error("matrix not symmetric at ({row}, {col}): difference {diff:e}")]
    MatrixNotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("zero/unstable mode {mode} (lambda = {lambda:e}): thermal state undefined")]
    ZeroMode { mode: usize, lambda: f64 },

    #[error("unstable potential: mode {mode} has negative lambda {lambda:e}")]
    UnstableMode { mode: usize, lambda: f64 },

    #[error("jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("negative radicand {0:e}: covariance is unphysical")]
    NegativeRadicand(f64),

    #[error("covariance matrix not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Schema { .. }
            | Error::PotentialNotSymmetric { .. }
            | Error::InvalidMass { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::SiteOutOfRange { .. }
            | Error::SameSite(_)
            | Error::MatrixNotSymmetric { .. } => ErrorKind::Input,
            Error::ZeroMode { .. } | Error::UnstableMode { .. } => ErrorKind::Physical,
            Error::NoConvergence { .. }
            | Error::NegativeRadicand(_)
            | Error::NotPositiveSemidefinite(_) => ErrorKind::Numerical,
        }
    }
}
