use thiserror::Error;

/// Errors raised by model loading, language enumeration and synthesis.
///
/// Verdicts (a failed check, an unrealizable specification) are never
/// errors; they are reported through the corresponding result types.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid model: {0}")]
    Invalid(String),

    #[error("duplicate transition from `{state}` on {input} with event `{event}`")]
    DuplicateTransition {
        state: String,
        input: String,
        event: String,
    },

    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },

    #[error("model declares no states")]
    EmptyStateSet,

    #[error("resource limit exceeded: {what} (limit {limit}){hint}")]
    ResourceLimit {
        what: String,
        limit: usize,
        hint: &'static str,
    },

    #[error("specification is not input-complete: no transition from `{state}` on {input}")]
    SpecNotInputComplete { state: String, input: String },

    #[error("specification has an empty marked language")]
    EmptySpecification,

    #[error("plant failed validation: {0}")]
    Validation(String),

    #[error("initial arena node is not winning for the supervisor")]
    NotWinning,

    #[error("strategy is undefined at reachable supervisor node {0}")]
    IncompleteStrategy(String),

    #[error("supervisor does not match plant: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn resource(what: impl Into<String>, limit: usize) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            limit,
            hint: "",
        }
    }
}
