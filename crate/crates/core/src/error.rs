use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("degenerate distribution: every block norm product is zero")]
    DegenerateDistribution,
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("infinite variance: block {0} has positive norm product but zero probability")]
    InfiniteVariance(usize),
    #[error("requested {requested} distinct blocks but the support has only {support}")]
    SupportTooSmall { requested: usize, support: usize },
    #[error("sampling exceeded the cap of {0} draws")]
    DrawCapExceeded(u64),
    #[error("select_stream needs at least one positive value")]
    EmptyStream,
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("undecodable set: block {block} has no live replica")]
    Undecodable { block: usize },
    #[error("insufficient workers: {workers} < recovery threshold {threshold}")]
    InsufficientWorkers { workers: usize, threshold: usize },
    #[error("below recovery threshold: {received} distinct responses, need {threshold}")]
    BelowThreshold { received: usize, threshold: usize },
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}
