use thiserror::Error;

/// Errors produced by the optimizer, its operators and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A vector did not have the length its bounds or population require.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A numeric parameter was outside its valid domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Bounds with `min >= max` in some dimension, or zero dimensions.
    #[error("invalid bounds: {0}")]
    Bounds(String),

    /// The evaluation budget cannot cover the requested evaluations.
    #[error("evaluation budget exhausted ({used}/{max} used, {requested} requested)")]
    BudgetExhausted { used: u64, max: u64, requested: u64 },

    /// Too few individuals for the requested operation.
    #[error("population of {found} is too small, need at least {required}")]
    InsufficientPopulation { required: usize, found: usize },

    /// Normalized diversity of zero makes the concave spread undefined.
    #[error("population diversity collapsed to zero")]
    DiversityCollapse,

    /// An individual was used where a fitness value is required.
    #[error("individual has not been evaluated")]
    Unevaluated,

    /// Bad or unknown configuration key / value.
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Short category label used by the CLI's error line.
    pub fn category(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } | Error::Bounds(_) | Error::Unevaluated => "contract",
            Error::Parameter { .. } => "parameter",
            Error::BudgetExhausted { .. } => "budget",
            Error::InsufficientPopulation { .. } | Error::DiversityCollapse => "population",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
