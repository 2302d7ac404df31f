use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("discrete functions are defined on different meshes")]
    MeshMismatch,

    #[error("operation is undefined for the zero function")]
    ZeroFunction,

    /// The descent stopped short of the residual tolerance. `best` holds
    /// the coefficients of the last iterate, normalized on the constraint
    /// sphere.
    #[error("no convergence after {iterations} iterations (quotient {quotient:.12e}, residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        quotient: f64,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("solve failed at s = {s}: {source}")]
    Sweep { s: f64, source: Box<Error> },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
