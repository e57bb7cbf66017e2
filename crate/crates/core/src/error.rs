use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("triangular factor is singular (diagonal {index})")]
    Singular { index: usize },

    #[error("degenerate communication graph: no edges to schedule")]
    DegenerateGraph,

    #[error("communication graph does not mix: lambda_2 of I - D/2 + W/2 is {lambda2}")]
    NoMixing { lambda2: f64 },

    #[error("step size too large: |q| = {value:e} at round {round}")]
    StepSizeTooLarge { round: u64, value: f64 },

    #[error("cleanup infeasible: {0}")]
    InfeasibleCleanup(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine token used in CSV status columns.
    pub fn token(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidParameters(_) => "invalid_parameters",
            Error::NotPositiveDefinite { .. } => "not_pd",
            Error::Singular { .. } => "singular",
            Error::DegenerateGraph => "degenerate_graph",
            Error::NoMixing { .. } => "no_mixing",
            Error::StepSizeTooLarge { .. } => "step_size_too_large",
            Error::InfeasibleCleanup(_) => "infeasible_cleanup",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
