use thiserror::Error;

/// A syntax error in a path expression or a UCQT query.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the input where the problem was detected.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

/// Structural errors raised while building schemas, databases and queries.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("node label `{0}` is declared more than once")]
    DuplicateNodeLabel(String),
    #[error("schema edge ({src}, {label}, {trg}) is declared more than once")]
    DuplicateSchemaEdge { src: String, label: String, trg: String },
    #[error("duplicate node id `{0}`")]
    DuplicateNodeId(String),
    #[error("dangling endpoint: edge `{edge}` refers to missing node `{node}`")]
    DanglingEndpoint { edge: String, node: String },
    #[error("label `{0}` is used both as a node label and as an edge label")]
    LabelClash(String),
    #[error("unknown data type `{0}`")]
    UnknownDataType(String),
    #[error("node `{node}`: {message}")]
    BadProperties { node: String, message: String },
    #[error("bad header in {file}: expected `{expected}`, found `{found}`")]
    BadHeader {
        file: &'static str,
        expected: &'static str,
        found: String,
    },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
