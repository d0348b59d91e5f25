use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The two decay exponents of the rate equations coincide.
    #[error("degenerate decay exponents alpha0 = {alpha0:e}, alpha1 = {alpha1:e}")]
    DegenerateExponents { alpha0: f64, alpha1: f64 },

    /// Fixed-step integration requested with a step that is too large for the rates.
    #[error("step {dt:e} s exceeds the stability limit {limit:e} s")]
    StepSize { dt: f64, limit: f64 },

    /// A ratio lies outside the range the closed form can attain.
    #[error("ratio {value} outside attainable range ({lo}, {hi})")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}

/// Fails with a domain error unless `value` is finite and strictly positive.
pub(crate) fn require_positive(op: &'static str, name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(op, format!("{name} must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(op: &'static str, name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(domain(op, format!("{name} must be finite and >= 0, got {value}")))
    }
}
