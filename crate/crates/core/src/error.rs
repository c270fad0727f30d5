//! Error signals shared by every module.
//!
//! Numerical contracts are enforced with typed signals rather than silent
//! garbage: truncated Fock sums carry their tail bound, quadratures report
//! non-convergence, and the "divide out a Gaussian prefactor" steps refuse to
//! amplify underflowed values.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, NumericsError>;

#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A truncated Fock sum's a-posteriori tail bound exceeded the tolerance.
    #[error("truncation tail bound {bound:.3e} exceeds tolerance {tol:.3e}")]
    Truncation { bound: f64, tol: f64 },

    /// A quadrature failed its convergence contract (doubling the node count
    /// moved the result by more than the declared tolerance).
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// The operator failed the growth condition required for holomorphic
    /// continuation (‖Â|n⟩‖ ≤ (K n^α)^n with α < 1).
    #[error("growth condition violated (fitted α = {alpha_fit:.4})")]
    GrowthCondition { alpha_fit: f64 },

    /// Dividing out a Gaussian prefactor would amplify noise past any
    /// meaning: the prefactor underflowed below 1e-280.
    #[error("range guard: prefactor exponent {exponent:.1} underflows in {context}")]
    RangeGuard { exponent: f64, context: String },

    /// A frame-change coefficient is singular because λ is too close to 1.
    #[error("singular coefficient: |lambda - 1| = {gap:.3e} is below epsilon {eps:.3e}")]
    SingularCoefficient { gap: f64, eps: f64 },

    /// The s-transform integrand does not decay (or decays too slowly to
    /// integrate at this truncation).
    #[error("non-integrable s-transform: {0}")]
    NonIntegrable(String),

    /// An anti-Husimi series over a non-polynomial operator does not
    /// terminate and the caller did not consent to truncation.
    #[error("series does not terminate (needs order {required}, max allowed {max_order}); pass an explicit truncation order to proceed")]
    NonTerminating { required: usize, max_order: usize },

    /// A high-order finite difference became noise-dominated. `estimate`
    /// still carries the computed value so callers may inspect it.
    #[error("unstable derivative estimate {estimate:.6e} (error bound {error_bound:.3e})")]
    UnstableDerivative { estimate: f64, error_bound: f64 },

    /// A Taylor partial sum's remainder estimate exceeded the tolerance.
    #[error("Taylor remainder estimate {remainder:.3e} exceeds tolerance {tol:.3e}")]
    RemainderTooLarge { remainder: f64, tol: f64 },

    /// A grid-based convolution's kernel mass is not covered by the grid.
    #[error("insufficient grid support: {0}")]
    InsufficientSupport(String),
}
