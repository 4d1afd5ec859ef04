use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("duplicate publication id `{0}`")]
    DuplicatePublication(String),

    #[error("duplicate reference id `{0}`")]
    DuplicateReference(String),

    #[error("unknown reference id `{0}`")]
    UnknownReference(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid gold labeling: {0}")]
    InvalidGold(String),

    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),

    #[error("cluster {0} is retired")]
    RetiredCluster(u32),

    #[error("cannot merge cluster {0} with itself")]
    SelfMerge(u32),

    #[error("prediction is not a partition of the evaluation scope: {0}")]
    NotAPartition(String),

    #[error("unsupported query attribute `{0}`")]
    UnsupportedAttribute(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
