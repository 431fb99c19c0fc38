use thiserror::Error;

/// Errors raised across the crate. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("enumeration of {tuples} tuples exceeds the budget of {budget}; use the grid evaluator")]
    Capacity { tuples: u128, budget: u64 },

    #[error("capacity exceeded: {0}")]
    CapacityLimit(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("grid [{lo}, {hi}] does not cover the support [{need_lo}, {need_hi}]")]
    Range {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Load { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("unknown table id {id:?}; valid ids: {valid}")]
    UnknownTable { id: String, valid: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
