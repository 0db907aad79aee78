use thiserror::Error;

/// Errors raised by the geometry, noise, tracker and simulator layers.
#[derive(Debug, Error)]
pub enum DenoiseError {
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("operation requires a non-empty region")]
    EmptyRegion,

    #[error("quantized distance {0} is not a realizable quantizer output")]
    NoPreimage(f64),

    #[error("belief kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid scenario config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
}

pub type Result<T, E = DenoiseError> = std::result::Result<T, E>;
