use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{len} entries do not form a square matrix")]
    NotSquare { len: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {re:e}{im:+e}i is not real and positive")]
    BadTrace { re: f64, im: f64 },

    #[error("scalar function undefined at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("layout with total dimension {product} does not fit a {dim}-dimensional matrix")]
    LayoutMismatch { product: usize, dim: usize },

    #[error("factor index {index} out of range for a {factors}-factor layout")]
    FactorOutOfRange { index: usize, factors: usize },

    #[error("feedback polynomial violates f(0) = 0 (f(0) = {f0:e}, f(1) = {f1:e})")]
    InvalidFeedback { f0: f64, f1: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("Darboux normalization F(t) vanishes at t = {t}")]
    DegenerateNormalization { t: f64 },

    #[error("positivity lost at t = {t} (minimum eigenvalue {min_eigenvalue:e})")]
    PositivityLost { t: f64, min_eigenvalue: f64 },

    #[error("oscillator level {level} exceeds the recurrence bound {max}")]
    LevelOutOfRange { level: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
