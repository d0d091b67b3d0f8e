use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not a unit square modulo {modulus}: {residue}")]
    NotUnitSquare { residue: u64, modulus: u64 },
    #[error("cannot parse rational: {0}")]
    ParseRational(String),
    #[error("malformed LP: {0}")]
    MalformedLp(String),
    #[error("problem too large for vertex enumeration: {0} variables (max 6)")]
    TooManyVariables(usize),
    #[error("solution is not optimal")]
    NotOptimal,
    #[error("density shortfall: |A| = {size} < {needed:.3}; retry with a larger prime")]
    DensityShortfall { size: usize, needed: f64 },
    #[error("calibration file: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
