use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("XML error at line {line}: {message}")]
    Xml { line: usize, message: String },

    #[error("trace {trace} has an event without a concept:name attribute")]
    MissingActivity { trace: usize },

    #[error("CSV error: {0}")]
    Csv(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unparsable timestamp {value:?} at row {row}")]
    Timestamp { row: u64, value: String },

    #[error("PNML error: {0}")]
    Pnml(String),

    #[error("duplicate variant at index {0}")]
    DuplicateVariant(usize),

    #[error("distance matrix does not match the variant list")]
    MatrixMismatch,

    #[error("invalid cluster count k={k}: must be between 1 and {variants} (number of variants)")]
    InvalidK { k: usize, variants: usize },

    #[error("transition {0} is not enabled")]
    NotEnabled(String),

    #[error("state budget of {budget} exceeded")]
    StateBudget { budget: usize },

    #[error("final marking is not reachable")]
    Unreachable,

    #[error("event log is empty")]
    EmptyLog,

    #[error("beta must be non-negative, got {0}")]
    NegativeBeta(f64),

    #[error("prototype {0} is not a variant of the log")]
    PrototypeNotInLog(String),

    #[error("invalid Petri net: {0}")]
    InvalidNet(String),

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration { iteration, source: Box::new(self) }
    }
}
