use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("embedded matrix does not have the [[A, -B], [B, A]] block structure (max deviation {deviation:e})")]
    BlockStructureViolation { deviation: f64 },
    #[error("unsupported constellation order {order} for {kind}")]
    UnsupportedOrder { kind: &'static str, order: usize },
    #[error("message index {index} out of range for space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("channel matrix is identically zero")]
    ZeroChannel,
    #[error("equalizer output has vanishing norm ({norm_sq:e})")]
    DegenerateEqualizer { norm_sq: f64 },
    #[error("adam state holds {expected} parameters, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite gradient entry at index {index}")]
    NonFiniteGradient { index: usize },
    #[error("alphabet of size {size} exceeds the exhaustive limit {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },
    #[error("singular value decomposition did not converge")]
    SvdFailure,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
