use thiserror::Error;

/// Errors raised by the analyses and the file parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("invalid tag name `{0}`")]
    InvalidTagName(String),
    #[error("word is not a product of Dyck primes")]
    NotWellFormed,
    #[error("word is not a Dyck prime")]
    NotPrime,
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("the grammar generates the empty language")]
    EmptyLanguage,
    #[error("the language is not a subset of the Dyck primes")]
    NotDyckSubset,
    #[error("the language is not a subset of D_{0}")]
    NotDyckPrimeSubset(String),
    #[error("grammar is not reduced: tag `{0}` is useless")]
    NotReduced(String),
    #[error("grammar is not sequential: cycle through `{0}`")]
    NotSequential(String),
    #[error("production is not balanced: {0}")]
    NotBalancedForm(String),
    #[error("element `{0}` is referenced but never declared")]
    UndeclaredElement(String),
    #[error("element `{0}` is declared twice")]
    DuplicateElement(String),
    #[error("state budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
