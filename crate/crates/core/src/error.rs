use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { point: f64, lo: f64, hi: f64 },

    #[error("domain mismatch: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(f64, f64, f64, f64),

    #[error("operation `{0}` does not support rational-linear segments")]
    RationalOperand(&'static str),

    #[error("empty piecewise function")]
    EmptyFunction,

    #[error("interval must be bounded, got [{0}, {1}]")]
    Unbounded(f64, f64),

    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("correct pieces do not refine the convert partition: {0}")]
    PartitionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid knapsack instance: {0}")]
    InvalidKnapsack(String),

    #[error("normal matrix is singular; use a ridge penalty lambda > 0")]
    SingularNormalMatrix,

    #[error("malformed solution descriptor: {0}")]
    MalformedSolution(String),

    #[error("instance {index}: {source}")]
    Instance {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_instance(self, index: usize) -> Self {
        Error::Instance {
            index,
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag used by the CLI error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutsideDomain { .. } => "outside_domain",
            Error::DomainMismatch(..) => "domain_mismatch",
            Error::RationalOperand(_) => "rational_operand",
            Error::EmptyFunction => "empty_function",
            Error::Unbounded(..) => "unbounded_interval",
            Error::InvalidInterval(..) => "invalid_interval",
            Error::Dimension(_) => "dimension_mismatch",
            Error::PartitionMismatch(_) => "partition_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidNetwork(_) => "invalid_network",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidKnapsack(_) => "invalid_knapsack",
            Error::SingularNormalMatrix => "singular_normal_matrix",
            Error::MalformedSolution(_) => "malformed_solution",
            Error::Instance { source, .. } => source.kind(),
            Error::Parse { .. } => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
