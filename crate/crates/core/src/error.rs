use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed group descriptor: {0}")]
    Descriptor(String),
    #[error("group table invalid: {0}")]
    BadTable(String),
    #[error("group order {order} exceeds the configured bound {bound}")]
    OrderBound { order: usize, bound: usize },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("group is not a {p}-group")]
    NotPGroup { p: u64 },
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("unsupported ring: {0}")]
    Ring(String),
    #[error("sign decomposition impossible: {0}")]
    SignDecomposition(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("d∘d ≠ 0 in degree {0}")]
    NotComplex(i32),
    #[error("index {index} exceeds the tensor-induction bound {bound}")]
    IndexBound { index: usize, bound: usize },
    #[error("linear system too large: {unknowns} unknowns (cap {cap}; raise TTPERM_MAX_RANK)")]
    TooLarge { unknowns: usize, cap: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("theory check failed: {0}")]
    TheoryCheck(String),
    #[error("bounds insufficient: {0}")]
    Bounds(String),
    #[error("invalid twist: {0}")]
    Twist(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
