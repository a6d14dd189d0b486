use thiserror::Error;

/// Failure modes of the laboratory operations.
///
/// `Certificate` is the only variant that signals a mathematical refutation
/// (a certificate inequality failed re-verification); everything else is an
/// engineering or input problem.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("resolution error: {msg} (required level {required_level})")]
    Resolution { msg: String, required_level: usize },
    #[error("hypothesis error: {0}")]
    Hypothesis(String),
    #[error("witness not found: {0}")]
    WitnessNotFound(String),
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("parameter error: {msg}")]
    Parameter { msg: String, max_feasible: Option<f64> },
    #[error("construction error: {0}")]
    Construction(String),
    #[error("premise error: seminorms differ at indices {offending:?}")]
    Premise { offending: Vec<usize> },
    #[error("data error: {0}")]
    Data(String),
    #[error("certificate failed: {inequality} ({certificate})")]
    Certificate { certificate: String, inequality: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}
