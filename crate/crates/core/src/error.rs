use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or derived quantity violates its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Evaluation point outside the range covered by tabulated data.
    #[error("t = {t} outside the tabulated domain [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },

    #[error("ω²(t) = {value} ≤ 0 at t = {t}")]
    NonPositiveFrequency { t: f64, value: f64 },

    #[error("gamma function pole at z = {re} + {im}i")]
    GammaPole { re: f64, im: f64 },

    #[error("hypergeometric series did not converge after {terms} terms")]
    NoConvergence { terms: usize },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    /// The Wronskian `m·Im(g*ġ)` drifted beyond the configured limit.
    #[error("Wronskian drift {drift:e} exceeds limit {limit:e} at t = {t}")]
    InvariantDrift { t: f64, drift: f64, limit: f64 },

    /// The post-check on a closed-form identity failed.
    #[error("identity check failed: {0}")]
    IdentityCheck(String),

    /// Reconstruction from an `Ω` schedule hit an inconsistent sample.
    #[error("inconsistent Ω schedule at t = {t}: (1+Ω')Ω/ω − Ω'²/2 = {value:e} < 0")]
    ConstraintViolation { t: f64, value: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
