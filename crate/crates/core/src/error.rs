//! Error type shared across the toolkit.

/// Errors produced by model construction, estimation, scoring, and ingestion.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid model or strategy parameters (non-PD covariance, bad counts, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Estimators called on inputs too small or degenerate to estimate from.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A team return RET <= -1, for which the log transform is undefined.
    /// Impossible under the gross-exposure cap with per-asset returns > -1,
    /// so this flags corrupted inputs rather than being clipped silently.
    #[error("return error: team {team} bankrupt at day {day} (RET = {ret})")]
    Bankruptcy { team: usize, day: usize, ret: f64 },

    /// Zero-variance or otherwise undefined score.
    #[error("score error: {0}")]
    Score(String),

    /// Linear-algebra failure (singular or non-PD matrix).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Structurally valid input that yields a degenerate result (zero vector, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Bad run configuration (empty grids, missing kernel cells, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// CSV / config-file ingestion failure, with the offending row when known.
    #[error("ingestion error at row {row}: {msg}")]
    Ingest { row: usize, msg: String },
}

impl Error {
    pub fn ingest(row: usize, msg: impl Into<String>) -> Self {
        Error::Ingest { row, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
