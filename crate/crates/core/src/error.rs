use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the fusion library.
#[derive(Debug, Error)]
pub enum FusionError {
    #[error("negative mass {value} at position {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, expected 1 (tolerance {tolerance:e})")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("non-finite value {value} in {context}")]
    NonFinite { context: String, value: f64 },

    #[error("index {index} out of range 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("frame mismatch: {left} vs {right} hypotheses")]
    FrameMismatch { left: usize, right: usize },

    #[error("total conflict {conflict} at combination step {step}")]
    TotalConflict { conflict: f64, step: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("empty subset")]
    EmptySubset,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("focal element {mask:#b} is neither a singleton nor the whole frame")]
    NonSingletonFocal { mask: u32 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("class {class} has no training patterns")]
    EmptyClass { class: usize },

    #[error("accuracy column for class {class} is all zero")]
    DegenerateColumn { class: usize },

    #[error("no root for lambda (densities {densities:?}, residual {residual:e})")]
    NoRoot { densities: Vec<f64>, residual: f64 },

    #[error("fuzzy measure chain ends at {value}, expected 1")]
    ChainNotNormalized { value: f64 },

    #[error("best single classifier has zero error; error reduction is undefined")]
    PerfectBaseline,

    #[error("parse error in {}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: u64,
        message: String,
    },

    #[error("pattern {pattern_id} present in {present} but missing from {missing}")]
    MissingPattern {
        pattern_id: u64,
        present: String,
        missing: String,
    },

    #[error("label {label:?} is not part of the frame")]
    UnknownLabel { label: String },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FusionError {
    /// Whether the error stems from bad user input rather than an internal fault.
    pub fn is_validation(&self) -> bool {
        match self {
            FusionError::NoRoot { .. } | FusionError::ChainNotNormalized { .. } => false,
            FusionError::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            _ => true,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FusionError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, FusionError>;
