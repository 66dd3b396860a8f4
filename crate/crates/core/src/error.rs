use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{what} out of range: {detail}")]
    Domain { what: &'static str, detail: String },

    /// Points too far apart for a single Euclidean chart of the torus.
    #[error("geometry: {0}")]
    Chart(String),

    #[error("configuration violates the hard-core constraint: {0}")]
    Overlap(String),

    #[error("random insertion failed after {attempts} restarts (n = {n}, rho = {rho})")]
    InsertionFailed { n: usize, rho: f64, attempts: usize },

    #[error("no valid displacement found after {attempts} attempts")]
    DisplacementFailed { attempts: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}
