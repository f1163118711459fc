use thiserror::Error;

/// Errors raised by profile construction, curvature evaluation and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: lower end must be strictly below upper end")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("non-finite derivative sample at x = {at}")]
    NumericOverflow { at: f64 },

    #[error(
        "finite-difference step {step} is too small for the working precision (tolerance {tol})"
    )]
    IllConditionedStep { step: f64, tol: f64 },

    #[error("profile domain [{lo}, {hi}] is unbounded; restrict it before probing")]
    UnboundedDomain { lo: f64, hi: f64 },

    #[error("r = {r} lies outside the admissible range ({lo}, {hi})")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    #[error("warping function vanishes at r = {r} (singular axis)")]
    SingularAxis { r: f64 },

    #[error("warping function is not positive at r = {r}")]
    NonPositiveWarp { r: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureFailure { estimate: f64, error_bound: f64 },

    #[error("region has zero volume")]
    DegenerateRegion,

    #[error("conformal factor is not positive at r = {r} (u = {value})")]
    InvalidConformalFactor { r: f64, value: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
