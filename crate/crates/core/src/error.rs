use thiserror::Error;

/// Errors raised by game construction, state handling and scheme evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rational {0:?}")]
    InvalidRational(String),

    #[error("game format: {0}")]
    GameFormat(String),

    #[error("game format: row {row}, column {col}: {msg}")]
    GameEntry { row: usize, col: usize, msg: String },

    #[error("game must have at least one row and one column (got {rows}x{cols})")]
    EmptyGame { rows: usize, cols: usize },

    #[error("shift ({r}, {c}) out of range for a {rows}x{cols} game")]
    ShiftOutOfRange { r: usize, c: usize, rows: usize, cols: usize },

    #[error("basis index |{i}{j}> out of range for dimensions {rows}x{cols}")]
    BasisOutOfRange { i: usize, j: usize, rows: usize, cols: usize },

    #[error("ket syntax error at byte {pos}: {msg}")]
    KetSyntax { pos: usize, msg: String },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("diagonal weights are not exact rationals; exact pipeline unavailable")]
    InexactWeights,

    #[error("non-real expectation value: imaginary residue {0:e}")]
    ComplexResidue(f64),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
