use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("unknown token {token:?} at position {position}")]
    Parse { position: usize, token: char },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("({k}, {m}) lies outside the window")]
    OutOfWindow { k: i64, m: i64 },

    #[error("symbol support {span} exceeds the window's w-range {range}")]
    SupportTooWide { span: i64, range: i64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "quadrature with {nodes} nodes on the {axis} circle aliases; need at least {required}"
    )]
    TooFewNodes {
        axis: &'static str,
        nodes: usize,
        required: usize,
    },

    #[error("block ({k}, {m}) is not of multiplication form (residual {residual:.3e})")]
    NotMultiplicationForm { k: i64, m: i64, residual: f64 },

    #[error("coefficient table is empty")]
    EmptyTable,

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("not a projection (deviation {0:.3e})")]
    NotProjection(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexRange { index: usize, limit: usize },
}
