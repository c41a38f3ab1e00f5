use thiserror::Error;

/// Errors produced by graph construction, file parsing and the analysis
/// operations.
#[derive(Debug, Error)]
pub enum MesoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {node} rejected")]
    SelfLoop { line: usize, node: u64 },

    #[error("node {node} carries label {label}, outside 0..{k}")]
    LabelOutOfRange { node: usize, label: usize, k: usize },

    #[error("partition covers {labels} nodes but the graph has {nodes}")]
    SizeMismatch { labels: usize, nodes: usize },

    #[error("graph has no edges")]
    DegenerateGraph,

    #[error("`{null}` is not supported for {}directed graphs", if *directed { "" } else { "un" })]
    UnsupportedNull { null: &'static str, directed: bool },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("directed/undirected operands do not match")]
    DirectednessMismatch,

    #[error("group {group} is not a valid index for K={k}")]
    InvalidGroup { group: usize, k: usize },

    #[error("K={k} exceeds the enumeration guard (max {max})")]
    TooManyGroups { k: usize, max: usize },

    #[error("edge {u} -- {v} joins two nodes on the same side")]
    NotBipartite { u: u32, v: u32 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MesoError>;
