use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u32),
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("digit {digit} out of range for base {base}")]
    InvalidDigit { digit: u32, base: u32 },
    #[error("not invertible in Q_{0}: leading digit shares a factor with the base")]
    NotInvertible(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("insufficient precision: digit at m^{position} is unknown")]
    InsufficientPrecision { position: i64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("divergent shell sum: {0}")]
    Divergent(String),
    #[error("size overflow: {cells} cells exceeds limit {limit}")]
    SizeOverflow { cells: u64, limit: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
