//! Numerical toolkit for generalized Husimi functions on truncated Fock
//! spaces.
//!
//! A *frame* is a pair (λ, θ): a squeezing width and a quadrature rotation
//! angle selecting a family of squeezed coherent states |x,p⟩. The Husimi
//! function of an operator is its diagonal expectation over that family;
//! because the expectation extends holomorphically to complex (x, p), the
//! full operator can be recovered from it. This crate implements:
//!
//! * the transform itself, its holomorphic continuation, and the inversion
//!   formula recovering matrix elements ([`transform`]);
//! * downstream reconstructions — position-representation matrix elements,
//!   the Wigner function, the s-ordered family, frame changes, and number
//!   probabilities from derivatives at the origin ([`reconstruction`]);
//! * propagation of measurement errors under analytic continuation,
//!   including closed forms and seeded Monte Carlo ([`analysis`]);
//! * closed forms for Fock states and a classical-smoothing
//!   (non-)representability experiment ([`demo`]).
//!
//! Everything works on finite N×N matrices in the frame's number basis.
//! Operations are pure functions over immutable inputs and are safe to call
//! concurrently.

pub mod analysis;
pub mod demo;
pub mod error;
pub mod fock;
pub mod reconstruction;
pub mod transform;

pub(crate) mod util;

pub use error::{NumericsError, Result};
pub use fock::{
    coherent_amplitudes, estimate_growth, position_overlap, rotate_quadratures, validate_density,
    CPhasePoint, ConvergenceEstimate, DensityOperator, DensityReport, GeneralOperator,
    SqueezedFrame, C64,
};
pub use transform::{
    complexified_midpoint, offdiag_direct, offdiag_element, squeezed_overlap, FieldMode,
    HusimiField, QuadratureSpec,
};
