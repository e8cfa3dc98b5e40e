use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step sizes violate beta*||A||^2 < 1/alpha - L/2 (slack {slack:e})")]
    StepCondition { slack: f64 },

    #[error("metric quadratic form is not positive ({value:e}) on a nonzero vector; step condition violated")]
    IndefiniteMetric { value: f64 },

    #[error("non-finite value in the {line} update at iteration {iteration}")]
    NonFinite { iteration: usize, line: &'static str },

    #[error("{0} is not supported")]
    Unsupported(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}
