use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("enumeration budget exceeded: kernel dimension {dimension} > {limit}")]
    BudgetExceeded { dimension: usize, limit: usize },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("unsupported block count {0}")]
    UnsupportedBlockCount(usize),

    #[error("invalid degree distribution: {0}")]
    DegreeDistribution(String),

    #[error("grid mismatch between densities")]
    GridMismatch,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("diversity collapse: a weight fraction is zero, error probability decays as T instead of T^2")]
    DiversityCollapse,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI and the C interface.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::BudgetExceeded { .. } => "budget",
            Error::Infeasible(_) => "infeasible",
            Error::UnsupportedBlockCount(_) => "unsupported-nc",
            Error::DegreeDistribution(_) => "degree-distribution",
            Error::GridMismatch => "grid-mismatch",
            Error::Numerical(_) => "numerical",
            Error::DiversityCollapse => "diversity-collapse",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
