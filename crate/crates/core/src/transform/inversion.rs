//! Recovery of number-basis matrix elements from the continued transform.
//!
//! The continued field evaluated at the complexified midpoint of two real
//! points yields ⟨pt1|Â|pt2⟩. Dividing by the coherent prefactor leaves
//! F(z̄₁, z₂) = Σ ρ_{nm} z̄₁ⁿ z₂ᵐ/√(n!m!) — a polynomial in two complex
//! variables, whose coefficients a double DFT over phase rings extracts
//! exactly once the ring holds at least as many phases as the truncation
//! dimension.

use nalgebra::DMatrix;

use crate::error::{NumericsError, Result};
use crate::fock::{CPhasePoint, DensityOperator, C64};
use crate::transform::{offdiag_element, HusimiField};
use crate::util::ln_factorial;

/// Ring radius giving well-conditioned extraction for dimensions up to ~16.
pub fn recommended_ring_radius(dim: usize) -> f64 {
    // Larger radii tame the r^{−n−m} amplification of high-order elements;
    // much beyond 2 the polynomial values start to spread over many digits.
    if dim <= 8 {
        1.6
    } else {
        1.8
    }
}

/// Reconstruct the number-basis matrix ⟨n|Â|m⟩ (n, m < dim) of a field's
/// source from off-diagonal elements sampled on two phase rings of the given
/// radius (in coherent-label units |z|).
pub fn reconstruct_matrix(field: &HusimiField, dim: usize, radius: f64) -> Result<DMatrix<C64>> {
    if dim == 0 {
        return Err(NumericsError::InvalidArgument(
            "reconstruction dimension must be positive".into(),
        ));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "ring radius must be positive, got {radius}"
        )));
    }
    // Phases per ring: must cover the source's actual degree, not just the
    // requested block, or higher components alias onto low ones.
    let k = dim.max(field.dim());
    let frame = *field.frame();
    let tau = std::f64::consts::TAU;

    // Real phase points whose coherent labels are z = r e^{iφ_j}.
    let points: Vec<CPhasePoint> = (0..k)
        .map(|j| {
            let z = C64::from_polar(radius, tau * j as f64 / k as f64);
            let s2 = std::f64::consts::SQRT_2;
            let xt = frame.lambda() * s2 * z.re;
            let pt = s2 * z.im / frame.lambda();
            let (x, p) = crate::fock::rotate_quadratures(
                C64::new(xt, 0.0),
                C64::new(pt, 0.0),
                -frame.theta(),
            );
            CPhasePoint::real(x.re, p.re)
        })
        .collect();

    // F_{jk} = ⟨pt_j|Â|pt_k⟩ e^{+(|z₁|²+|z₂|²)/2} = Σ ρ_{nm} z̄₁ⁿz₂ᵐ/√(n!m!);
    // on the ring both moduli are r.
    let lift = (radius * radius).exp();
    let mut f = DMatrix::<C64>::zeros(k, k);
    for j in 0..k {
        for l in 0..k {
            let elem = offdiag_element(field, points[j], points[l])?;
            f[(j, l)] = elem * lift;
        }
    }

    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim {
        for m in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..k {
                let ph_j = C64::new(0.0, tau * (n * j) as f64 / k as f64).exp();
                for l in 0..k {
                    let ph_l = C64::new(0.0, -tau * (m * l) as f64 / k as f64).exp();
                    acc += f[(j, l)] * ph_j * ph_l;
                }
            }
            let scale = (0.5 * (ln_factorial(n) + ln_factorial(m))).exp()
                / radius.powi((n + m) as i32)
                / (k * k) as f64;
            out[(n, m)] = acc * scale;
        }
    }
    Ok(out)
}

/// [`reconstruct_matrix`] wrapped as a density operator: symmetrizes the
/// roundoff and declares any missing trace as tail.
pub fn reconstruct_density(
    field: &HusimiField,
    dim: usize,
    radius: f64,
) -> Result<DensityOperator> {
    let m = reconstruct_matrix(field, dim, radius)?;
    let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let trace: f64 = (0..dim).map(|i| sym[(i, i)].re).sum();
    let tail = (1.0 - trace).clamp(0.0, 1.0 - f64::EPSILON);
    Ok(DensityOperator::new_unchecked(sym, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DensityOperator, GeneralOperator, SqueezedFrame};
    use rand::{Rng, SeedableRng};

    fn random_density(dim: usize, rng: &mut impl rand::Rng) -> DensityOperator {
        let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let mut m = g.adjoint() * &g;
        let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
        m /= C64::new(tr, 0.0);
        DensityOperator::new_unchecked(m, 0.0)
    }

    #[test]
    fn round_trip_random_states() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(101);
        for &dim in &[3usize, 6, 9] {
            let frame =
                SqueezedFrame::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.0)).unwrap();
            let rho = random_density(dim, &mut rng);
            let field = HusimiField::from_density(frame, &rho);
            let back = reconstruct_density(&field, dim, recommended_ring_radius(dim)).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    worst = worst.max((back.elements()[(i, j)] - rho.elements()[(i, j)]).norm());
                }
            }
            assert!(worst < 1e-10, "dim {dim}: worst entry error {worst:.3e}");
        }
    }

    #[test]
    fn fock_state_recovery() {
        let frame = SqueezedFrame::new(1.3, 0.9).unwrap();
        let rho = DensityOperator::fock(2, 5).unwrap();
        let field = HusimiField::from_density(frame, &rho);
        let back = reconstruct_matrix(&field, 5, 1.6).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == 2 && j == 2 { 1.0 } else { 0.0 };
                assert!(
                    (back[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-11,
                    "entry ({i},{j}) = {}",
                    back[(i, j)]
                );
            }
        }
    }

    #[test]
    fn operator_mode_matrix_recovery() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(55);
        let frame = SqueezedFrame::new(0.8, 0.3).unwrap();
        let m = DMatrix::<C64>::from_fn(5, 5, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let op = GeneralOperator::new(m.clone()).unwrap();
        let field = HusimiField::from_operator(frame, &op);
        let back = reconstruct_matrix(&field, 5, 1.8).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                worst = worst.max((back[(i, j)] - m[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-10, "worst {worst:.3e}");
    }

    #[test]
    fn oversized_reconstruction_returns_zeros_outside() {
        let frame = SqueezedFrame::reference();
        let rho = DensityOperator::fock(1, 3).unwrap();
        let field = HusimiField::from_density(frame, &rho);
        let back = reconstruct_matrix(&field, 6, 1.6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert!((back[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }
}
