use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A position does not exist in the term it was applied to.
    #[error("invalid position {position} in term {term}")]
    InvalidPosition { position: String, term: String },

    /// A vertex name that is not part of the graph under consideration.
    #[error("unknown vertex {vertex}")]
    UnknownVertex { vertex: String },

    /// A term uses a symbol the automaton's alphabet does not declare
    /// (or declares with a different arity).
    #[error("symbol {symbol} is not in the automaton's alphabet")]
    AlienSymbol { symbol: String },

    /// Two automata were combined that are not over the same alphabet.
    #[error("alphabets differ: {detail}")]
    AlphabetMismatch { detail: String },

    /// Structurally invalid input to a constructor (duplicate symbol,
    /// rule over undeclared states, arity mismatch, ...).
    #[error("malformed {what}: {detail}")]
    Malformed { what: String, detail: String },

    /// An argument outside the operation's domain (e.g. building the
    /// power-of-two counter automaton for m = 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured desk-scale cap was exceeded. The message names the
    /// cap so callers can tell which limit fired.
    #[error("resource limit exceeded: {what} (needed {needed}, cap {cap})")]
    ResourceLimit {
        what: String,
        needed: String,
        cap: String,
    },

    /// Text input that does not conform to one of the file formats.
    #[error("parse error on line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

impl Error {
    pub(crate) fn malformed(what: &str, detail: impl Into<String>) -> Self {
        Error::Malformed {
            what: what.to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn limit(what: &str, needed: impl ToString, cap: impl ToString) -> Self {
        Error::ResourceLimit {
            what: what.to_string(),
            needed: needed.to_string(),
            cap: cap.to_string(),
        }
    }

    pub(crate) fn parse(line: usize, detail: impl Into<String>) -> Self {
        Error::Parse {
            line,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
