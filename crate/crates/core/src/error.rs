use thiserror::Error;

/// Errors raised by curve, manifold, dynamics and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined
    /// (negative time, state outside the manifold domain, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator (or `1 - h`) that must stay positive was found non-positive.
    #[error("positivity violation at x = {x}: value {value:.6e}")]
    Positivity { x: f64, value: f64 },

    /// A manifold state domain contains a state whose chart denominator vanishes.
    #[error("positivity violation: denominator {value:.6e} at x = {x} for state {z:?}")]
    PositivityWitness { z: Vec<f64>, x: f64, value: f64 },

    /// Adaptive quadrature ran out of bisection depth.
    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate:.17e}, error {error:.3e}")]
    Quadrature { a: f64, b: f64, estimate: f64, error: f64 },

    /// The curves spanning a manifold are numerically dependent.
    #[error("degenerate manifold: Gram eigenvalues min {min_eigenvalue:.3e}, max {max_eigenvalue:.3e}")]
    DegenerateManifold { min_eigenvalue: f64, max_eigenvalue: f64 },

    /// The least-squares design matrix does not have full column rank.
    #[error("ill-posed fit: {0}")]
    IllPosedFit(String),

    /// The operation needs structure the manifold does not carry.
    #[error("unsupported manifold: {0}")]
    UnsupportedManifold(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
