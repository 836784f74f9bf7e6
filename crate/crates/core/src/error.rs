use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("value-overflow at knot {knot} (s = {s}, log-exponent = {log_exponent})")]
    ValueOverflow { knot: usize, s: f64, log_exponent: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("postcondition violated: {0}")]
    Postcondition(String),

    #[error("invalid samples: {0}")]
    InvalidSamples(String),
}

impl Error {
    /// True for errors caused by bad caller input rather than a failed check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Postcondition(_) | Error::ValueOverflow { .. })
    }
}
