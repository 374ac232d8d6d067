use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed relation line: {0}")]
    MalformedLine(String),

    #[error("unknown modality tag `{0}`")]
    UnknownTag(String),

    #[error("duplicate lexicon entry ({lemma}, {pos})")]
    DuplicateEntry { lemma: String, pos: String },

    #[error("invalid relation node {node} (sentence has {len} tokens)")]
    InvalidNode { node: usize, len: usize },

    #[error("invalid parse: {0}")]
    InvalidParse(String),

    #[error("invalid type `{0}`: types must be lowercase identifiers")]
    InvalidType(String),

    #[error("count table for {0} is empty")]
    DegenerateTable(String),

    #[error("malformed row: {0}")]
    MalformedRow(String),

    #[error("portion mismatch: {0}")]
    PortionMismatch(String),

    #[error("precision/recall sweep needs at least one positive label")]
    NoPositives,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: line {line}: {source}")]
    AtLine {
        context: String,
        line: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_line(self, context: impl Into<String>, line: usize) -> Self {
        Error::AtLine {
            context: context.into(),
            line,
            source: Box::new(self),
        }
    }
}
