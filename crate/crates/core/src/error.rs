use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// Malformed input text, located by 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A sentence whose dependency edges do not form a tree.
    #[error("sentence {sentence_id}: {message}")]
    Structure { sentence_id: String, message: String },

    /// A JSON-lines record that does not match the expected schema.
    #[error("line {line}: schema violation at `{path}`: {message}")]
    Schema { line: usize, path: String, message: String },

    /// Rule-file diagnostic with 1-based line and column.
    #[error("rules {line}:{column}: {message}")]
    Rule {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("gazetteer: {0}")]
    Gazetteer(String),

    #[error("index: {0}")]
    Index(String),

    #[error("{0}")]
    Invalid(String),

    /// A broken internal invariant rather than bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// True when the error was caused by the caller's input.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}
