//! Error types shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Error taxonomy for the toolkit.
///
/// `Precision` carries the partial value accumulated before the failure so
/// callers can still inspect a diverging quadrature.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid argument (empty grid, bad ordering, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// Requested accuracy could not be reached within the work budget.
    #[error("precision error: {what}")]
    Precision {
        what: String,
        /// Best value obtained before giving up, if any.
        partial: Option<f64>,
    },

    /// Evaluation at a pole of the underlying function.
    #[error("pole error: {0}")]
    Pole(String),

    /// Configuration problem; `path` points at the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn precision(msg: impl Into<String>, partial: Option<f64>) -> Self {
        Error::Precision {
            what: msg.into(),
            partial,
        }
    }

    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
