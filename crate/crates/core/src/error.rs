use thiserror::Error;

/// Errors raised by the algebraic and numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("letter {letter} is outside the alphabet 1..={alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("degree {degree} exceeds the cap {cap}")]
    CapOverflow { degree: usize, cap: usize },

    #[error("majorant arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("word length {len} exceeds the limit {limit} for {what}")]
    LengthGuard { what: &'static str, len: usize, limit: usize },

    #[error("Fock depth {depth} is too small, need {needed}")]
    InsufficientDepth { depth: usize, needed: usize },

    #[error("matrix of size {size} exceeds the limit {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("Gram matrix is numerically singular: smallest eigenvalue {min_eig:e}")]
    NearSingular { min_eig: f64 },

    #[error("derivation has no zeta (adjoint of 1⊗1) attached")]
    MissingZeta,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series diverges at radius {radius} (majorant evaluates to {value})")]
    Divergent { radius: f64, value: f64 },

    #[error("operator norm {norm} of generator {index} exceeds the guard {guard}")]
    NormGuard { index: usize, norm: f64, guard: f64 },

    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
