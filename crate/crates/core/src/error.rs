use thiserror::Error;

/// Errors raised while building, propagating, or analysing a qubit system.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=4")]
    QubitCount(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("coupling matrix is not symmetric at pair ({j},{k}): J[{j}][{k}] = {jk}, J[{k}][{j}] = {kj}")]
    AsymmetricCoupling {
        j: usize,
        k: usize,
        jk: f64,
        kj: f64,
    },

    #[error("coupling matrix has non-zero diagonal entry J[{0}][{0}] = {1}")]
    SelfCoupling(usize, f64),

    #[error("phase classification requires delta = 0, got {0}")]
    OffPtLine(f64),

    #[error("period undefined: omega = {omega} does not exceed gamma/4 = {quarter_gamma}")]
    PeriodUndefined { omega: f64, quarter_gamma: f64 },

    #[error("non-finite entry encountered in {0}")]
    NonFinite(&'static str),

    #[error("post-selection probability vanished (norm {norm:e} below floor {floor:e})")]
    PostSelectionVanished { norm: f64, floor: f64 },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("empty search window [{start}, {end}]")]
    EmptyWindow { start: f64, end: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("no point in [{start}, {end}] us reached the target; widen the window")]
    NotFound { start: f64, end: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::PostSelectionVanished { .. }
                | Error::EigenSolver(_)
                | Error::NotFound { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
