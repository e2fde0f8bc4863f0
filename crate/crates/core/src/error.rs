use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("union graph is empty")]
    EmptyUnion,
    #[error("ill-formed rule: {0}")]
    IllFormedRule(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid match: {0}")]
    InvalidMatch(String),
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
    #[error("input graphs {0} and {1} are isomorphic")]
    DuplicateIsomorphicInput(usize, usize),
    #[error("monomorphisms map components that are not rule-isomorphic")]
    IncomparableComponents,
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed network document: {0}")]
    Network(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
