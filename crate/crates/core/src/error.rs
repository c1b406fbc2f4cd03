use thiserror::Error;

/// Errors produced by the bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The adaptive integrator ran out of budget or could not subdivide further.
    /// Carries the best estimate reached so far.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (best estimate {value:e} ± {abs_error:e})"
    )]
    NonConvergence {
        value: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("g-function has a removable singularity at n = {n}")]
    RemovableSingularity { n: f64 },

    #[error("closed-form routes disagree: {quantity} = {primary:e} vs {alternate:e}")]
    RouteMismatch {
        quantity: &'static str,
        primary: f64,
        alternate: f64,
    },

    #[error("closed-form Fisher information `{quantity}` is not positive ({value:e})")]
    NonPositiveFisher { quantity: &'static str, value: f64 },

    /// Fisher matrix is (numerically) rank deficient; `null_direction` is the
    /// unit eigenvector of the smallest eigenvalue in parameter coordinates.
    #[error(
        "singular Fisher matrix (condition {condition:e}); near-null direction {null_direction:?}"
    )]
    SingularFisher {
        condition: f64,
        null_direction: [f64; 3],
    },

    #[error("azimuth is unidentifiable for a terminal on the central perpendicular line")]
    UnidentifiableAzimuth,

    #[error("unsupported split factor {0}; expected 1, 4 or 16")]
    InvalidSplit(u32),

    #[error("{0}")]
    Unsupported(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
