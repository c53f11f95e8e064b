use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid needs at least one interior node per axis")]
    EmptyGrid,

    #[error("unsupported dimension {0}; only 1 and 2 are available")]
    UnsupportedDimension(usize),

    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },

    #[error("field has {found} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, found: usize },

    #[error("reaction flow blows up at node {node} (state {value:e}, time {time:e})")]
    BlowUp { node: usize, value: f64, time: f64 },

    #[error("non-finite state at node {node} (time {time:e})")]
    NonFinite { node: usize, time: f64 },

    #[error("step {step} (t = {time:e}) failed: {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("the exponential Euler linear flow requires time-independent boundary data")]
    TimeDependentBoundary,

    #[error("reaction term `{0}` has no closed-form flow")]
    NoClosedForm(String),

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("problem file line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn at_step(self, step: usize, time: f64) -> Error {
        Error::Step {
            step,
            time,
            source: Box::new(self),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
