//! Reconstruction of state data from the continued transform: squeezed-state
//! position matrix elements, the Wigner function, the s-ordered family,
//! cross-frame Husimi functions, and number-state probabilities from origin
//! derivatives.
//!
//! All operations here consume a [`HusimiField`] (or a sampled grid) and
//! recover quantities that are ordinarily computed straight from the density
//! matrix; the point is that they only touch the field through its continued
//! values, so they double as working demonstrations that the transform is
//! invertible along many independent routes.
//!
//! The oscillatory inversion integrals share one numerical idea: every
//! integrand is an entire function of the integration variables with Gaussian
//! decay, so the contour of a Gauss–Hermite rule can be shifted into the
//! complex plane to absorb the Fourier phase exactly. For the Wigner-type and
//! frame-change integrals the shifted integrand is a pure polynomial times
//! the Gauss–Hermite weight (the continuation's exponential cancels the
//! kernel Gaussian identically), so a rule with roughly `dim` nodes is exact
//! up to rounding. Only the position-representation inversion keeps a
//! residual transcendental factor and needs a genuine two-axis product rule.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{NumericsError, Result};
use crate::fock::{power_over_sqrt_factorial, SqueezedFrame};
use crate::transform::{FieldMode, HusimiField};

mod frame_change;
mod number_prob;
mod stransform;
mod wigner;
mod xphi;

pub use frame_change::{frame_change_large_lambda, frame_change_small_lambda};
pub use number_prob::{
    default_origin_step, number_prob_from_origin, number_prob_from_samples, MAX_ORIGIN_ORDER,
};
pub use stransform::{
    s_existence_diagnostic, s_transform_direct, s_transform_from_continuation,
    smooth_s_to_husimi, GrowthVerdict, SExistenceReport, STransformParams,
};
pub use wigner::{q_via_wigner_convolution, wigner_from_imaginary, WignerGrid};
pub use xphi::xphi_element;

/// Exponent above which a divided-out Gaussian prefactor has magnitude below
/// 1e-280 and the inversion would amplify noise past any useful precision.
pub(crate) const PREFACTOR_GUARD: f64 = 644.46;

/// Largest exponent we hand to `exp` while assembling integrand factors.
pub(crate) const LOCAL_EXP_GUARD: f64 = 660.0;

/// Coefficients of the slice geometry tying a frame `(λ, θ)` to the
/// x_φ representation: with δ = θ − φ,
/// b = λ²cos²δ + λ⁻²sin²δ, c = −(λ² − λ⁻²) sinδ cosδ,
/// d = b cosφ + c sinφ, f = b sinφ − c cosφ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoefficients {
    pub delta: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
}

/// Slice coefficients for reconstructing x_φ matrix elements from a frame.
pub fn frame_coefficients(frame: &SqueezedFrame, phi: f64) -> FrameCoefficients {
    let lam = frame.lambda();
    let delta = frame.theta() - phi;
    let (sd, cd) = delta.sin_cos();
    let (l2, il2) = (lam * lam, 1.0 / (lam * lam));
    let b = l2 * cd * cd + il2 * sd * sd;
    let c = -(l2 - il2) * sd * cd;
    let (sp, cp) = phi.sin_cos();
    FrameCoefficients {
        delta,
        b,
        c,
        d: b * cp + c * sp,
        f: b * sp - c * cp,
    }
}

/// The double power series Σ A_nm z₋ⁿ z₊ᵐ/√(n!m!) with the field's mode
/// prefactor but *without* the exp(−z₋z₊) envelope. The reconstruction
/// integrals fold that envelope analytically into their kernel Gaussians, so
/// evaluating the bare series is both faster and immune to the overflow that
/// plagues the naive product of a huge envelope and a tiny kernel.
pub(crate) fn series_value(field: &HusimiField, z_minus: C64, z_plus: C64) -> C64 {
    let m: &DMatrix<C64> = field.elements();
    let d = m.nrows();
    let vm = power_over_sqrt_factorial(z_minus, d);
    let vp = power_over_sqrt_factorial(z_plus, d);
    let mut acc = C64::new(0.0, 0.0);
    for c in 0..d {
        let mut col = C64::new(0.0, 0.0);
        for r in 0..d {
            col += vm[r] * m[(r, c)];
        }
        acc += col * vp[c];
    }
    match field.mode() {
        FieldMode::Density => acc / (2.0 * std::f64::consts::PI),
        FieldMode::Operator => acc,
    }
}

/// Continued value exp(−z₋z₊)·series at an explicit (z₋, z₊) pair, guarded
/// against exponent overflow. Used where the envelope does not cancel.
pub(crate) fn continued_value(field: &HusimiField, z_minus: C64, z_plus: C64) -> Result<C64> {
    let expo = -(z_minus * z_plus);
    if expo.re > LOCAL_EXP_GUARD {
        return Err(NumericsError::RangeGuard {
            exponent: expo.re,
            context: "continued-series envelope".into(),
        });
    }
    Ok(expo.exp() * series_value(field, z_minus, z_plus))
}
