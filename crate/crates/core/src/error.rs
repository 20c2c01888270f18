//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants are
//! grouped by the stage that produces them: data ingestion, series
//! construction, windowed statistics, pricing, and hedging. Numerical
//! degeneracies (a vanishing volatility horizon, an initial trend that grows
//! at exactly the risk-free rate) get dedicated variants so callers can tell
//! "bad input" apart from "the method does not apply here".

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Reading an input file failed at the OS level.
    #[error("failed to read {path}: {source}")]
    Io {
        /// Path that was being read.
        path: PathBuf,
        /// Underlying OS error.
        #[source]
        source: std::io::Error,
    },

    /// A CSV field that should hold a price did not parse as a number.
    /// `row` is the zero-based index of the data row (the header, when
    /// present, is not counted).
    #[error("data row {row}: cannot parse {field:?} as a price")]
    UnparsablePrice { row: usize, field: String },

    /// A price was zero, negative, or not finite. `row` is the zero-based
    /// position of the offending sample.
    #[error("data row {row}: price {value} is not strictly positive and finite")]
    NonPositivePrice { row: usize, value: f64 },

    /// A named CSV column was requested but the header does not contain it.
    #[error("column {0:?} not found in the CSV header")]
    ColumnNotFound(String),

    /// A CSV row has fewer fields than the selected column index requires.
    #[error("data row {row} has no column {index}")]
    ColumnOutOfBounds { row: usize, index: usize },

    /// A series is shorter than an operation requires.
    #[error("series has {len} samples but at least {min} are required")]
    SeriesTooShort { len: usize, min: usize },

    /// A sliding window does not fit into the series it is applied to.
    #[error("window of {window} samples does not fit a series of length {len}")]
    WindowTooLarge { window: usize, len: usize },

    /// Two series that must be aligned have different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A scalar argument is outside its documented domain. The message names
    /// the argument and the constraint it violates.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A windowed variance came out below the negative round-off tolerance,
    /// which indicates corrupt input rather than floating-point noise.
    #[error("windowed variance at index {index} is {value}, below -1e-12")]
    NegativeVariance { index: usize, value: f64 },

    /// A trend value is non-positive where a positive level is required
    /// (logarithms, relative rates, pricing).
    #[error("trend value {value} at index {index} is not strictly positive")]
    NonPositiveTrend { index: usize, value: f64 },

    /// Pricing inputs place the quote outside the model: the volatility
    /// horizon `sigma * sqrt(tau)` must be strictly positive for the
    /// closed-form quantiles to exist.
    #[error("degenerate pricing inputs: sigma and tau must be strictly positive")]
    DegenerateInputs,

    /// The initial hedge ratio is undefined because the smoothed price
    /// drifts at (numerically exactly) the risk-free rate, so the tracking
    /// rule divides by zero. Perturbing the start index or widening the
    /// estimation window usually resolves this.
    #[error(
        "degenerate initialization: the initial trend grows at the risk-free rate \
         and the hedge ratio is undefined"
    )]
    DegenerateInitialization,

    /// A hedging run asked for a volatility sample past the end of the
    /// supplied volatility series.
    #[error("volatility sample {index} requested but only {len} are available")]
    VolIndexOutOfRange { index: usize, len: usize },
}
