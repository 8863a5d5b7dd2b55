use std::path::PathBuf;

/// Errors produced by the screening library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("sample contains NaN")]
    NanInSample,

    #[error("more slices than observations: {slices} slices for {n} observations")]
    TooManySlices { slices: usize, n: usize },

    #[error("length mismatch: {left} != {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate variable (zero variance)")]
    DegenerateVariable,

    #[error("non-finite value in column {column} at row {row}")]
    NonFinite { column: usize, row: usize },

    #[error("d_n = {d_n} exceeds the number of variables p = {p}")]
    ScreenSizeTooLarge { d_n: usize, p: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite integrand value at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("C1 unverifiable: no strict gap separates the active set from the rest")]
    C1Unverifiable,

    #[error("truth set is empty")]
    EmptyTruth,

    #[error("{method} requires a {required} response")]
    UnsupportedResponse {
        method: String,
        required: &'static str,
    },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
