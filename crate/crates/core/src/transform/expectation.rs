//! Trace evaluation over complexified phase space: Tr(Âρ̂) as a
//! Gaussian-weighted 4-real-dimensional integral of A^c(x̄,p̄)·Q^c(x,p).
//!
//! In frame coordinates the explicit weight together with the two
//! continuation exponentials combines into the perfect Gaussian
//! exp[−x_Rθ²/λ² − x_Iθ²/λ² − λ²p_Rθ² − λ²p_Iθ²], so a product
//! Gauss–Hermite rule aligned to those axes integrates truncated sources
//! exactly once the per-axis node count exceeds the combined matrix
//! dimension.

use crate::error::{NumericsError, Result};
use crate::fock::{
    rotate_quadratures, CPhasePoint, DensityOperator, GeneralOperator, SqueezedFrame, C64,
};
use crate::transform::quadrature::{gauss_hermite, QuadratureSpec};
use crate::transform::{continued_with_tail, HusimiField};

/// Tr(Âρ̂) by the full complexified-phase-space integral
/// (2/π)∫d⁴ exp[−(2/λ²)x_Iθ² − 2λ²p_Iθ²] A^c(x̄,p̄) Q^c(x,p).
/// Both sources must live in the same frame's number basis.
///
/// The integral is a functional of the blocks alone and is compared against
/// the matrix-algebra trace of the same blocks, so declared truncation
/// tails do not enter here: pointwise evaluation is where tail uncertainty
/// is signaled. The continuation's per-node tail bounds are therefore
/// deliberately not propagated from this routine.
///
/// Floating-point limit: with exact node counts the truncated integrand
/// oscillates with peak magnitude ~2^(dim_A + dim_ρ) (the interior maximum
/// of e^{−σ}σᴺ/N!-type ladder products sits at σ ≈ N), all of which cancels
/// analytically. In f64 that caps reliable use near dim_A + dim_ρ ≈ 45;
/// beyond it the refinement check fails rather than returning noise.
pub fn expectation_full(
    a: &GeneralOperator,
    rho: &DensityOperator,
    frame: &SqueezedFrame,
    quad: &QuadratureSpec,
) -> Result<C64> {
    quad.validate()?;
    let a_field = HusimiField::from_operator(*frame, a);
    if !a_field
        .growth_estimate()
        .map(|g| g.passes)
        .unwrap_or(true)
    {
        return Err(NumericsError::GrowthCondition {
            alpha_fit: a_field.growth_estimate().map(|g| g.alpha_fit).unwrap(),
        });
    }
    let q_field = HusimiField::from_density(*frame, rho);

    // Exactness bound: the integrand is the perfect Gaussian times a
    // polynomial of per-axis degree < 2(dim_A + dim_ρ).
    let exact_nodes = a.dim() + rho.dim() + 2;
    let nodes = quad.nodes_for(0).max(exact_nodes);
    let base = integrate(&a_field, &q_field, frame, nodes)?;
    if quad.verify {
        let fine = integrate(&a_field, &q_field, frame, nodes * quad.refine.max(2))?;
        let scale = base.norm().max(1.0);
        if (fine - base).norm() > 1e-8 * scale {
            return Err(NumericsError::QuadratureNonConvergence(format!(
                "4D trace integral moved by {:.3e} under refinement",
                (fine - base).norm()
            )));
        }
        return Ok(fine);
    }
    Ok(base)
}

fn integrate(
    a_field: &HusimiField,
    q_field: &HusimiField,
    frame: &SqueezedFrame,
    nodes: usize,
) -> Result<C64> {
    let rule = gauss_hermite(nodes);
    let lam = frame.lambda();
    let theta = frame.theta();
    let mut total = C64::new(0.0, 0.0);
    // Substitution x_Rθ = λs₁, x_Iθ = λs₂, p_Rθ = s₃/λ, p_Iθ = s₄/λ has unit
    // Jacobian; effective weights absorb the combined Gaussian sampled from
    // the integrand itself.
    for (i1, &s1) in rule.nodes.iter().enumerate() {
        let w1 = rule.effective_weights[i1];
        let x_rt = lam * s1;
        for (i2, &s2) in rule.nodes.iter().enumerate() {
            let w2 = rule.effective_weights[i2];
            let x_it = lam * s2;
            for (i3, &s3) in rule.nodes.iter().enumerate() {
                let w3 = rule.effective_weights[i3];
                let p_rt = s3 / lam;
                for (i4, &s4) in rule.nodes.iter().enumerate() {
                    let w4 = rule.effective_weights[i4];
                    let p_it = s4 / lam;
                    let xt = C64::new(x_rt, x_it);
                    let pt = C64::new(p_rt, p_it);
                    let (x, p) = rotate_quadratures(xt, pt, -theta);
                    let (q, _) = continued_with_tail(q_field, CPhasePoint::new(x, p))?;
                    let (ac, _) = continued_with_tail(
                        a_field,
                        CPhasePoint::new(x.conj(), p.conj()),
                    )?;
                    let weight_exp =
                        (-2.0 * x_it * x_it / (lam * lam) - 2.0 * lam * lam * p_it * p_it).exp();
                    total += C64::new(w1 * w2 * w3 * w4 * weight_exp, 0.0) * ac * q;
                }
            }
        }
    }
    Ok(total * (2.0 / std::f64::consts::PI))
}
