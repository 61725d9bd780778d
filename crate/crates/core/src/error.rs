use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max |h_ij - conj(h_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid density matrix: {check} (value {value:e})")]
    InvalidState { check: &'static str, value: f64 },

    #[error("invalid Bell-diagonal parameters: eigenvalue {expression} = {value} is negative")]
    InvalidBellParams {
        expression: &'static str,
        value: f64,
    },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("basis index {0} out of range 0..=3")]
    BasisIndex(usize),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("unknown {kind} '{value}'")]
    UnknownName { kind: &'static str, value: String },
}
