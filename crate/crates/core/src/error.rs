use thiserror::Error;

/// Errors raised by the optimization engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("requested {requested} designs but only {available} are available")]
    Budget { requested: usize, available: usize },

    #[error("duplicate design row {0:?}")]
    DuplicateRow(Vec<f64>),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("correlation matrix could not be factorized even with nugget {nugget:e}")]
    Conditioning { nugget: f64 },

    #[error("singular least-squares fit (rank {rank} < {columns} columns)")]
    SingularFit { rank: usize, columns: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("SMO did not converge after {iterations} iterations (KKT violation {violation:e})")]
    Convergence { iterations: usize, violation: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("candidate grid is empty")]
    EmptyGrid,

    #[error("no portfolio model produced finite selection scores")]
    SelectionFailure,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("no feasible design in the starting sample")]
    InfeasibleStart,

    #[error("iteration {k}: {source}")]
    Iteration {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("weight {w:?}: {source}")]
    Weight {
        w: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("no feasible grid point to build an oracle from")]
    EmptyOracle,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn at_iteration(self, k: usize) -> Self {
        match self {
            e @ Error::Iteration { .. } => e,
            e => Error::Iteration { k, source: Box::new(e) },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
