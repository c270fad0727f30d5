//! Change of squeezing frame: evaluate the transform of a target frame
//! (λ, θ) directly from the continued transform of the reference frame
//! (λ = 1), without passing through matrix elements.
//!
//! Both branches run the same machinery: a two-axis Gaussian integral whose
//! contour is shifted onto the stationary line, sampled on a rotated
//! imaginary slice where the quadrature envelope cancels the continuation
//! envelope exactly, so only the bare double series is summed per node. The
//! coefficient algebra differs between λ < 1 and λ > 1 (the roles of the
//! oscillatory and decaying axes swap), hence two entry points; λ = 1 needs
//! no integral at all and the coefficients blow up, so a window around it is
//! refused.

use num_complex::Complex64 as C64;

use crate::error::{NumericsError, Result};
use crate::fock::{CPhasePoint, SqueezedFrame};
use crate::transform::quadrature::gauss_hermite;
use crate::transform::{FieldMode, HusimiField, QuadratureSpec};

use super::{series_value, PREFACTOR_GUARD};

/// Minimum |λ − 1| before the branch coefficients are declared singular.
const LAMBDA_EPS: f64 = 1e-3;

struct BranchCoefficients {
    a_u: f64,
    b_u: C64,
    a_v: f64,
    b_v: f64,
    net: f64,
    divided: f64,
    prefactor: f64,
    /// (cosθ, sinθ) baked into the slice map.
    trig: (f64, f64),
    small_lambda: bool,
}

impl BranchCoefficients {
    fn slice_point(&self, u: C64, v: C64) -> CPhasePoint {
        let (c, s) = self.trig;
        if self.small_lambda {
            CPhasePoint {
                x: -v * s + C64::i() * u * c,
                p: v * c + C64::i() * u * s,
            }
        } else {
            CPhasePoint {
                x: v * c + C64::i() * u * s,
                p: v * s - C64::i() * u * c,
            }
        }
    }
}

fn small_lambda_coefficients(target: &SqueezedFrame, x: f64, p: f64) -> BranchCoefficients {
    let lam = target.lambda();
    let l2 = lam * lam;
    let (xt, pt) = target.rotate_real(x, p);
    let a_u = (1.0 + l2) / (2.0 * (1.0 - l2));
    let b_u = C64::new(0.0, -2.0 * xt / (1.0 - l2));
    let b_v = 2.0 * pt * l2 / (1.0 - l2);
    let (st, ct) = target.theta().sin_cos();
    BranchCoefficients {
        a_u,
        b_u,
        a_v: a_u,
        b_v,
        net: -(xt * xt + l2 * pt * pt) / (1.0 + l2),
        divided: xt * xt / (1.0 - l2),
        prefactor: lam / (std::f64::consts::PI * (1.0 - l2)),
        trig: (ct, st),
        small_lambda: true,
    }
}

fn large_lambda_coefficients(target: &SqueezedFrame, x: f64, p: f64) -> BranchCoefficients {
    let lam = target.lambda();
    let l2 = lam * lam;
    let il2 = 1.0 / l2;
    let (xt, pt) = target.rotate_real(x, p);
    let a_u = (1.0 + il2) / (2.0 * (1.0 - il2));
    let b_u = C64::new(0.0, 2.0 * pt / (1.0 - il2));
    let a_v = (l2 + 1.0) / (2.0 * (l2 - 1.0));
    let b_v = 2.0 * xt / (l2 - 1.0);
    let (st, ct) = target.theta().sin_cos();
    BranchCoefficients {
        a_u,
        b_u,
        a_v,
        b_v,
        net: -(xt * xt + l2 * pt * pt) / (1.0 + l2),
        divided: pt * pt / (1.0 - il2),
        prefactor: 1.0 / (lam * std::f64::consts::PI * (1.0 - il2)),
        trig: (ct, st),
        small_lambda: false,
    }
}

fn frame_change_core(
    ref_field: &HusimiField,
    quad: &QuadratureSpec,
    coeff: BranchCoefficients,
) -> Result<f64> {
    quad.validate()?;
    if !ref_field.frame().is_reference() {
        return Err(NumericsError::InvalidArgument(
            "frame change starts from the reference-frame transform".into(),
        ));
    }
    if ref_field.mode() != FieldMode::Density {
        return Err(NumericsError::InvalidArgument(
            "frame change is defined for density-mode fields".into(),
        ));
    }
    if coeff.divided > PREFACTOR_GUARD {
        return Err(NumericsError::RangeGuard {
            exponent: coeff.divided,
            context: "frame-change prefactor division".into(),
        });
    }

    let n = quad.nodes_for(0).max(ref_field.dim() + 8);
    let value = shifted_sum(ref_field, &coeff, n)?;
    let value = if quad.verify {
        let check = shifted_sum(ref_field, &coeff, n * quad.refine.max(2))?;
        if (value - check).norm() > ref_field.tolerance().max(1e-9) * (1.0 + check.norm()) {
            return Err(NumericsError::QuadratureNonConvergence(format!(
                "frame-change refinement moved the result by {:.3e}",
                (value - check).norm()
            )));
        }
        check
    } else {
        value
    };
    if value.im.abs() > 1e-8 * value.re.abs().max(1.0) {
        return Err(NumericsError::QuadratureNonConvergence(format!(
            "imaginary residual {:.3e} after frame change",
            value.im
        )));
    }
    Ok(value.re)
}

fn shifted_sum(ref_field: &HusimiField, coeff: &BranchCoefficients, n: usize) -> Result<C64> {
    let rule = gauss_hermite(n);
    let ref_frame = ref_field.frame();
    let u0 = coeff.b_u / (2.0 * coeff.a_u);
    let v0 = C64::new(coeff.b_v / (2.0 * coeff.a_v), 0.0);
    let su = coeff.a_u.sqrt();
    let sv = coeff.a_v.sqrt();

    let mut total = C64::new(0.0, 0.0);
    for (tj, wj) in rule.nodes.iter().zip(rule.weights.iter()) {
        let u = u0 + C64::new(tj / su, 0.0);
        for (tk, wk) in rule.nodes.iter().zip(rule.weights.iter()) {
            let v = v0 + C64::new(tk / sv, 0.0);
            // On this slice z₋z₊ = (v² − u²)/2 exactly, which the shifted
            // Gaussian envelope cancels: only the bare series survives.
            let (zm, zp) = ref_frame.z_pm(coeff.slice_point(u, v));
            total += C64::new(wj * wk, 0.0) * series_value(ref_field, zm, zp);
        }
    }
    let scale = coeff.prefactor / (su * sv) * coeff.net.exp();
    Ok(total * scale)
}

/// Transform of a squeezed target frame with 0 < λ < 1, from the
/// reference-frame continued transform.
pub fn frame_change_small_lambda(
    ref_field: &HusimiField,
    target: &SqueezedFrame,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let lam = target.lambda();
    if !(lam > 0.0 && lam < 1.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "small-lambda branch needs 0 < lambda < 1, got {lam}"
        )));
    }
    let gap = (lam - 1.0).abs();
    if gap <= LAMBDA_EPS {
        return Err(NumericsError::SingularCoefficient {
            gap,
            eps: LAMBDA_EPS,
        });
    }
    let coeff = small_lambda_coefficients(target, x, p);
    frame_change_core(ref_field, quad, coeff)
}

/// Transform of a squeezed target frame with λ > 1, from the reference-frame
/// continued transform.
pub fn frame_change_large_lambda(
    ref_field: &HusimiField,
    target: &SqueezedFrame,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let lam = target.lambda();
    if !(lam > 1.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "large-lambda branch needs lambda > 1, got {lam}"
        )));
    }
    let gap = (lam - 1.0).abs();
    if gap <= LAMBDA_EPS {
        return Err(NumericsError::SingularCoefficient {
            gap,
            eps: LAMBDA_EPS,
        });
    }
    let coeff = large_lambda_coefficients(target, x, p);
    frame_change_core(ref_field, quad, coeff)
}
