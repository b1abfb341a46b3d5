use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation needs a nonsingular matrix.
    #[error("singular input: {0}")]
    SingularInput(String),

    /// A rank or clustering decision could not be made at the given tolerance.
    #[error("structure error at stage `{stage}` (tol {tol:e}): {detail}")]
    Structure {
        stage: &'static str,
        tol: f64,
        detail: String,
    },

    /// Malformed input data.
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn structure(stage: &'static str, tol: f64, detail: impl Into<String>) -> Self {
        Error::Structure {
            stage,
            tol,
            detail: detail.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
