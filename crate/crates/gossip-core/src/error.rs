use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("graph file, line {line}: {msg}")]
    GraphFormat { line: usize, msg: String },

    #[error("self-loop {node} rejected")]
    SelfLoop { node: usize },

    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },

    #[error("graph is disconnected: no path from {u} to {v}")]
    Disconnected { u: usize, v: usize },

    #[error("cut side must be a proper non-empty subset")]
    ImproperCut,

    #[error("exact enumeration limited to {cap} nodes, graph has {n}; use the sampled estimator")]
    TooLarge { n: usize, cap: usize },

    #[error("node {u} tried to contact {v}, which is not a neighbor")]
    NotANeighbor { u: usize, v: usize },

    #[error("local view of node {node} has radius {have}, needs {need}")]
    ViewTooShallow { node: usize, have: usize, need: usize },

    #[error("guess ({a}, {b}) outside the {m}x{m} universe")]
    GuessOutOfRange { a: usize, b: usize, m: usize },

    #[error("{got} guesses submitted, round budget is {budget}")]
    GuessBudget { got: usize, budget: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
