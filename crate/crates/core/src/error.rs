use thiserror::Error;

/// Errors produced by the matrix, bound, generator and search layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square or empty: {rows} rows, row {bad_row} has {len} entries")]
    NotSquare { rows: usize, bad_row: usize, len: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("state is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("state trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("eigenvector matrix is not unitary: max deviation {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid spectrum: lambda_min = {lambda_min}, lambda_max = {lambda_max}")]
    InvalidSpectrum { lambda_min: f64, lambda_max: f64 },

    #[error("coefficient denominator vanishes while the trace term is {trace_term:e}")]
    DegenerateCoefficient { trace_term: f64 },

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("q must be finite, got {0}")]
    NonFiniteQ(f64),

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("evaluation budget must be at least 1")]
    BudgetZero,

    #[error("q grid is empty")]
    EmptyGrid,

    #[error("master inequality violated: refined {refined:e} > product {product:e}\n{instance}")]
    Violation {
        refined: f64,
        product: f64,
        /// Serialized instance (instance-file JSON) for replay.
        instance: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
