use thiserror::Error;

use crate::multiset::Symbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("multiset underflow: cannot subtract {subtrahend} from {minuend}")]
    Underflow { minuend: String, subtrahend: String },

    #[error("multiplicity overflow for symbol {0}")]
    Overflow(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown reaction label `{0}`")]
    UnknownLabel(String),

    #[error("enumeration budget of {limit} explored bags exceeded")]
    BudgetExceeded { limit: usize },

    #[error("input symbol {0} is not in the input alphabet")]
    InputSymbol(Symbol),

    #[error("restriction ({condition}) violated: {detail}")]
    Restriction {
        condition: &'static str,
        detail: String,
    },

    #[error("compilation failed: {0}")]
    Compile(String),

    #[error("invalid definition:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),

    #[error("trace is not accepting")]
    NotAccepting,

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
