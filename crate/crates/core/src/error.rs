use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("non-finite loss at training step {step}")]
    NonFiniteLoss { step: usize },

    #[error("bad IDX magic {found:#010x}, expected 0x00000803")]
    IdxMagic { found: u32 },

    #[error("IDX payload truncated: header declares {expected} bytes, found {actual}")]
    IdxTruncated { expected: usize, actual: usize },

    #[error("IDX payload has {extra} trailing bytes beyond the declared dimensions")]
    IdxTrailing { extra: usize },

    #[error("IDX dimensions {dims:?} overflow the addressable size")]
    IdxDimOverflow { dims: Vec<u32> },

    #[error("not a model file (magic {found:?})")]
    ModelMagic { found: [u8; 4] },

    #[error("unsupported model format version {0}")]
    ModelVersion(u32),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("pixel value {value} outside [0, 1]")]
    PixelRange { value: f32 },

    #[error("stream exhausted: requested {requested} samples, {remaining} left")]
    StreamExhausted { requested: usize, remaining: usize },

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("posterior undefined at {at}: both weighted densities vanish or diverge")]
    UndefinedPosterior { at: f64 },

    #[error("no threshold: {0}")]
    NoThreshold(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse grouping used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numeric,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidArgument(_) => ErrorCategory::Usage,
            ShapeMismatch { .. }
            | EmptyDataset
            | IdxMagic { .. }
            | IdxTruncated { .. }
            | IdxTrailing { .. }
            | IdxDimOverflow { .. }
            | ModelMagic { .. }
            | ModelVersion(_)
            | Format { .. }
            | PixelRange { .. }
            | StreamExhausted { .. }
            | TooFewValues { .. }
            | Io(_)
            | Json(_) => ErrorCategory::Data,
            NonFiniteLoss { .. }
            | Degenerate(_)
            | Domain(_)
            | NoConvergence(_)
            | UndefinedPosterior { .. }
            | NoThreshold(_) => ErrorCategory::Numeric,
        }
    }

    pub fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }
}
