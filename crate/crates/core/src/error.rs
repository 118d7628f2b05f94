use thiserror::Error;

/// Errors produced by the coverage engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scenario parameter violates its domain constraint.
    #[error("invalid scenario: {field}: {reason}")]
    InvalidScenario {
        field: &'static str,
        reason: String,
    },

    /// A 3D distance below the minimum feasible distance between the user
    /// and any base station.
    #[error("distance {r} m is below the minimum feasible 3D distance {r_min} m")]
    InfeasibleDistance { r: f64, r_min: f64 },

    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance. Carries the error estimate it did achieve.
    #[error(
        "quadrature did not converge: achieved abs error {achieved:.3e}, \
         requested abs {requested_abs:.1e} / rel {requested_rel:.1e}"
    )]
    QuadratureNonConvergence {
        achieved: f64,
        requested_abs: f64,
        requested_rel: f64,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidScenario {
            field,
            reason: reason.into(),
        }
    }
}
