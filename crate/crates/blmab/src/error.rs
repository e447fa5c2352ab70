use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error taxonomy for the library. The CLI maps these onto exit codes, so
/// constructors should pick the variant by failure class, not by module.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: u32, residual: f64 },

    /// A configuration is internally inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation was called on a policy state that cannot serve it.
    #[error("policy state error: {0}")]
    State(String),

    /// A curve cannot be fitted.
    #[error("fit error: {0}")]
    Fit(String),

    /// A parameter estimate cannot be formed from the given samples.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A text input failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input data is syntactically fine but unusable.
    #[error("data error: {0}")]
    Data(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }
}
