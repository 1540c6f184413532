use thiserror::Error;

use crate::automaton::Violations;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("undeclared action `{0}`")]
    UndeclaredAction(String),

    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("alphabet config, line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("probability weights of `{flip}` sum to {sum}, expected 1")]
    WeightSum { flip: String, sum: String },

    #[error("action `{0}` declared more than once")]
    Duplicate(String),

    #[error("not a p-automaton: {0}")]
    NotPAutomaton(String),

    #[error("malformed automaton: {0}")]
    Malformed(Violations),

    #[error("format error: {0}")]
    Format(String),

    #[error("state space guardrail exceeded: {what} has {states} states (cap {cap})")]
    Guardrail {
        what: String,
        states: usize,
        cap: usize,
    },

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("missing binding for variable `{0}`")]
    MissingBinding(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
