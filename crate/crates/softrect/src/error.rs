//! Crate-wide error type.
//!
//! Rectangle and layer indices in messages are 1-based, matching the
//! external file formats and CLI output.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has no rectangles")]
    EmptyInstance,

    #[error("area of rectangle {index} is not positive")]
    NonPositiveArea { index: usize },

    #[error("{side} must be positive")]
    NonPositiveSide { side: &'static str },

    #[error("area-sum mismatch: rectangle areas sum to {area_sum}, region is {region_area}")]
    AreaSumMismatch { area_sum: String, region_area: String },

    #[error("rectangle {index} appears in more than one layer")]
    DuplicateIndex { index: usize },

    #[error("rectangle {index} is missing from the partition")]
    MissingIndex { index: usize },

    #[error("rectangle index {index} out of range (instance has {n} rectangles)")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("layer {layer} is empty")]
    EmptyLayer { layer: usize },

    #[error("rectangles {i} and {j} are in the same layer")]
    SameLayer { i: usize, j: usize },

    #[error("weight requires i < j, got i={i}, j={j}")]
    WeightRange { i: usize, j: usize },

    #[error("subsequence problem needs at least one position")]
    EmptySubsequence,

    #[error("concavity check needs at least 4 rectangles, got {n}")]
    TooSmallForConcavity { n: usize },

    #[error("instance has {n} rectangles, exceeding the enumeration guard of {limit}")]
    EnumerationGuard { n: usize, limit: usize },

    #[error("subset sum {sum} exceeds the pseudo-polynomial guard of {limit}")]
    SubsetSumGuard { sum: u64, limit: u64 },

    #[error("aspect-ratio threshold must be at least 1, got {phi}")]
    ThresholdBelowOne { phi: f64 },

    #[error("perimeter threshold and area must be positive")]
    NonPositiveThreshold,

    #[error("source problem has no integers")]
    EmptySource,

    #[error("could not reduce areas to match the region ({deficit} units left over)")]
    GenerationFailed { deficit: u64 },

    #[error("variable name {name:?} is invalid")]
    BadVariableName { name: String },

    #[error("variable {name:?} declared twice")]
    DuplicateVariable { name: String },

    #[error("unknown variable {name:?}")]
    UnknownVariable { name: String },

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("zero denominator in rational {0:?}")]
    ZeroDenominator(String),

    #[error("unsupported instance file version {version}")]
    UnsupportedVersion { version: u64 },

    #[error("malformed solution line {line}: {text:?}")]
    MalformedSolutionLine { line: usize, text: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
