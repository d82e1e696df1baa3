use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { what: String, iterations: usize },

    #[error("quadrature disagreement: {first} vs {second} (relative {relative:e})")]
    Quadrature {
        first: f64,
        second: f64,
        relative: f64,
    },

    #[error("refinement failed from seed {seed_re}{seed_im:+}i: {reason}")]
    Refinement {
        seed_re: f64,
        seed_im: f64,
        reason: String,
    },

    #[error("zero enumeration for nu = {nu}: {reason}")]
    Enumeration { nu: f64, reason: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("spectrum incomplete: {0}")]
    Completeness(String),

    #[error("lambda is a resonance (|H1(lambda a)| = {magnitude:e})")]
    Pole { magnitude: f64 },

    #[error("under-resolved grid: {0}")]
    Resolution(String),

    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
