use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("no edges after preprocessing")]
    NoEdgesAfterPreprocessing,

    #[error("node id {node} out of range (n = {n})")]
    NodeOutOfRange { node: u32, n: usize },

    #[error("edge {edge} has no reward table attached")]
    MissingReward { edge: usize },

    #[error("unknown reward function `{0}`")]
    UnknownReward(String),

    #[error("invalid reward table: {0}")]
    InvalidReward(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("reward of edge {edge} is not convex")]
    NotConvex { edge: usize },

    #[error("capacity overflow: {0}")]
    CapacityOverflow(String),

    #[error("instance has {n} nodes, brute force is limited to {max}")]
    TooLarge { n: usize, max: usize },

    #[error("instance has zero total reward")]
    ZeroReward,

    #[error("infeasible constraints: {0}")]
    Infeasible(String),

    #[error("decision oracle returned a set that does not improve the density")]
    OracleNoProgress,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
