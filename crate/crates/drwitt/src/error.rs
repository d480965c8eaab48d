use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("consecutive differentials do not compose to zero at degree {degree}")]
    NonComplex { degree: i64 },
    #[error("Witt law depth {requested} exceeds the configured cap {cap}")]
    DepthCap { requested: usize, cap: usize },
    #[error("Witt vectors of lengths {left} and {right} cannot be combined")]
    LengthMismatch { left: usize, right: usize },
    #[error("ghost components need a p-torsion-free coefficient ring")]
    TorsionCoefficients,
    #[error("operation needs length at least {needed}, got {got}")]
    LengthUnderflow { needed: usize, got: usize },
    #[error("relation `{relation}` is not quasi-homogeneous: {detail}")]
    NonQuasiHomogeneous { relation: String, detail: String },
    #[error("unsupported base change: {0}")]
    UnsupportedBaseChange(String),
    #[error("unsupported ring kind for this operation: {0}")]
    UnsupportedKind(String),
    #[error("precision budget exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by p^{exponent} is not exact: {context}")]
    InexactDivision { exponent: u32, context: String },
    #[error("unit symbol enumeration exceeded its budget of {budget}")]
    UnitEnumerationCap { budget: usize },
    #[error("filtration transition into level {level} is not injective in degree {degree}")]
    NonInjectiveTransitions { level: i64, degree: i64 },
    #[error("hom-set enumeration of size {size} exceeds budget {budget}")]
    HomSetTooLarge { size: u128, budget: u128 },
    #[error("spectral sequence does not degenerate: {0}")]
    DegenerationFailed(String),
    #[error("ring is not of local type: {0}")]
    NotLocalType(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
