use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {re}{im:+}i lies outside the {domain}")]
    OutsideDomain { re: f64, im: f64, domain: &'static str },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("trajectory left the domain at t = {t}")]
    DomainEscape { t: f64 },

    #[error("step budget exhausted at t = {t}")]
    MaxSteps { t: f64 },

    #[error("quadrature did not converge (value {value_re}{value_im:+}i, error {error:e})")]
    QuadratureNotConverged { value_re: f64, value_im: f64, error: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no sign change of the target on the search slice")]
    NoSignChange,

    #[error("numerically unreliable: {0}")]
    Unreliable(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("generator fails admissibility: min Re p = {min_re_p:e}")]
    NotAdmissible { min_re_p: f64 },
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGenerator(_)
                | Error::InvalidArgument(_)
                | Error::OutsideDomain { .. }
                | Error::RegimeMismatch(_)
                | Error::HypothesisViolation(_)
                | Error::InsufficientSamples { .. }
                | Error::NotAdmissible { .. }
        )
    }

    pub(crate) fn outside(z: num_complex::Complex64, domain: &'static str) -> Self {
        Error::OutsideDomain { re: z.re, im: z.im, domain }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
