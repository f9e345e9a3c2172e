use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier mismatch: {0} vs {1}")]
    CarrierMismatch(usize, usize),

    #[error("element {elem} out of range for carrier of size {size}")]
    OutOfRange { elem: usize, size: usize },

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("operation `{op}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },

    #[error("unknown operation `{0}`")]
    UnknownOp(String),

    #[error("variable x{var} out of range for an environment of length {len}")]
    VariableOutOfRange { var: usize, len: usize },

    #[error("signatures differ")]
    SignatureMismatch,

    #[error("not a congruence: {0}")]
    NotCongruence(String),

    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("not a uniformity: {0}")]
    NotUniformity(String),

    #[error("relation is not a member of the filter")]
    NotInFilter,

    #[error("relation is not reflexive")]
    NotReflexive,

    #[error("generating set is empty and the signature has no constants")]
    EmptyGeneration,

    #[error("clone budget of {0} tables exhausted")]
    BudgetExhausted(usize),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("not a group: {0}")]
    NotGroup(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
