//! The s-ordered transform family A^{(s)}_{λθ}: the direct defining integral
//! over displacement-operator traces, the reconstruction from the continued
//! transform, the smoothing that walks back down to the Husimi end of the
//! family, and a growth diagnostic for when the transform only exists as a
//! distribution.
//!
//! Normalization: we scale the family so that s = 0 on a density operator is
//! the unit-mass Wigner function and s = −1 is the density-mode transform
//! itself; the defining trace integral therefore carries 1/(2π)² rather than
//! the bare 1/π² of the symmetric convention.

use num_complex::Complex64 as C64;

use crate::error::{NumericsError, Result};
use crate::fock::{CPhasePoint, GeneralOperator, SqueezedFrame};
use crate::transform::quadrature::gauss_hermite;
use crate::transform::{offdiag_direct, HusimiField, QuadratureSpec};
use crate::util::ln_factorial;

use super::wigner::{continued_s_integral, s_rule_for};

/// Order and frame of an s-ordered transform. Orders below −1 are out of
/// scope; orders at or above 0 exist only for operators whose displacement
/// trace decays fast enough, so the direct integral demands an explicit
/// opt-in (see [`STransformParams::allow_nonnegative_order`]).
#[derive(Debug, Clone)]
pub struct STransformParams {
    pub s: f64,
    pub frame: SqueezedFrame,
    allow_nonnegative: bool,
}

impl STransformParams {
    pub fn new(s: f64, frame: SqueezedFrame) -> Result<Self> {
        if !s.is_finite() || s < -1.0 {
            return Err(NumericsError::InvalidArgument(
                "transform order must be finite and at least -1".into(),
            ));
        }
        Ok(Self {
            s,
            frame,
            allow_nonnegative: false,
        })
    }

    /// Acknowledge that s ≥ 0 is only conditionally integrable and run the
    /// direct integral anyway (the operator decay probe still applies).
    pub fn allow_nonnegative_order(mut self) -> Self {
        self.allow_nonnegative = true;
        self
    }

    pub fn nonnegative_order_allowed(&self) -> bool {
        self.allow_nonnegative
    }
}

/// Envelope-free displacement matrix element ⟨m|D̂(β)|n⟩·e^{+|β|²/2}, by the
/// associated-Laguerre recurrence. The omitted Gaussian cancels exactly
/// against the order kernel and the quadrature weight in the direct
/// integral, which keeps every factor representable.
fn displacement_element_bare(beta: C64, t: f64, m: usize, n: usize) -> C64 {
    let k = m.abs_diff(n);
    let lo = m.min(n);
    let mut l0 = 1.0;
    let mut l1 = 1.0 + k as f64 - t;
    let l = match lo {
        0 => l0,
        1 => l1,
        _ => {
            for q in 1..lo {
                let next =
                    ((2.0 * q as f64 + 1.0 + k as f64 - t) * l1 - (q as f64 + k as f64) * l0)
                        / (q as f64 + 1.0);
                l0 = l1;
                l1 = next;
            }
            l1
        }
    };
    let amp = (0.5 * (ln_factorial(lo) - ln_factorial(m.max(n)))).exp();
    if m >= n {
        amp * beta.powu(k as u32) * l
    } else {
        amp * (-beta.conj()).powu(k as u32) * l
    }
}

fn bare_displacement_trace(a: &GeneralOperator, beta: C64) -> C64 {
    let d = a.elements();
    let dim = a.dim();
    let t = beta.norm_sqr();
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..dim {
        for n in 0..dim {
            acc += displacement_element_bare(beta, t, m, n) * d[(n, m)];
        }
    }
    acc
}

/// The defining trace integral of A^{(s)}, evaluated on the real rotated
/// plane (the |β|² envelope is not analytic, so no contour shift applies;
/// node counts instead grow with the Fourier frequency of the phase).
pub fn s_transform_direct(
    a: &GeneralOperator,
    params: &STransformParams,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<C64> {
    quad.validate()?;
    let s = params.s;
    if s >= 1.0 {
        return Err(NumericsError::NonIntegrable(
            "order at or above 1 leaves no Gaussian decay in the trace integral".into(),
        ));
    }
    if s >= 0.0 && !params.allow_nonnegative {
        return Err(NumericsError::NonIntegrable(
            "nonnegative order requires the explicit integrability override".into(),
        ));
    }
    // Operators whose matrix mass reaches the truncation boundary have
    // displacement traces that never decay within this truncation (the
    // identity is the canonical case): the integral is meaningless.
    let dim = a.dim();
    if dim >= 2 {
        let row_mass: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|j| a.elements()[(i, j)].norm()).sum())
            .collect();
        let max = row_mass.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 && row_mass[dim - 1] >= 0.3 * max {
            return Err(NumericsError::NonIntegrable(
                "operator mass reaches the truncation boundary; displacement trace cannot decay"
                    .into(),
            ));
        }
    }

    let value = direct_sum(a, params, x, p, quad.nodes_for(0))?;
    if quad.verify {
        let lam = params.frame.lambda();
        let (xt, pt) = params.frame.rotate_real(x, p);
        let root = (1.0 - s).sqrt();
        let base = chosen_nodes(dim, quad.nodes_for(0), xt, pt, lam, root)?;
        let check = direct_sum(a, params, x, p, base * quad.refine.max(2))?;
        if (value - check).norm() > 1e-9 * (1.0 + check.norm()) {
            return Err(NumericsError::QuadratureNonConvergence(format!(
                "direct transform refinement moved the result by {:.3e}",
                (value - check).norm()
            )));
        }
    }
    Ok(value)
}

fn chosen_nodes(
    dim: usize,
    requested: usize,
    xt: f64,
    pt: f64,
    lam: f64,
    root: f64,
) -> Result<usize> {
    let sa = 2.0 * lam / root;
    let sb = 2.0 / (lam * root);
    let omega = (pt.abs() * sa).max(xt.abs() * sb);
    let n = requested.max(2 * dim + 24 + (0.75 * omega * omega).ceil() as usize);
    if n > 1600 {
        return Err(NumericsError::QuadratureNonConvergence(format!(
            "direct transform would need {n} nodes per axis at this point"
        )));
    }
    Ok(n)
}

fn direct_sum(
    a: &GeneralOperator,
    params: &STransformParams,
    x: f64,
    p: f64,
    requested: usize,
) -> Result<C64> {
    let s = params.s;
    let frame = &params.frame;
    let lam = frame.lambda();
    let (xt, pt) = frame.rotate_real(x, p);
    let root = (1.0 - s).sqrt();
    let sa = 2.0 * lam / root;
    let sb = 2.0 / (lam * root);
    let n = chosen_nodes(a.dim(), requested, xt, pt, lam, root)?;
    let rule = gauss_hermite(n);

    let mut total = C64::new(0.0, 0.0);
    for (tj, wj) in rule.nodes.iter().zip(rule.weights.iter()) {
        let aa = sa * tj; // x'_θ
        for (tk, wk) in rule.nodes.iter().zip(rule.weights.iter()) {
            let bb = sb * tk; // p'_θ
            let beta = C64::new(aa / lam, lam * bb) / std::f64::consts::SQRT_2;
            // bare trace × phase: the envelope, the order kernel and the
            // Gauss–Hermite weight multiply to exactly one.
            let tr = bare_displacement_trace(a, beta);
            let phase = C64::new(0.0, pt * aa - xt * bb).exp();
            total += C64::new(wj * wk, 0.0) * phase * tr;
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(total * sa * sb / (two_pi * two_pi))
}

/// A^{(s)} (−1 < s < 1) reconstructed from the continued transform by the
/// shifted-contour Gaussian integral; s = 0 is [`wigner_from_imaginary`]
/// without the reality reduction. Output normalization follows the field
/// mode.
///
/// [`wigner_from_imaginary`]: super::wigner_from_imaginary
pub fn s_transform_from_continuation(
    field: &HusimiField,
    params: &STransformParams,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<C64> {
    quad.validate()?;
    let f = field.frame();
    if (f.lambda() - params.frame.lambda()).abs() > 1e-12
        || (f.theta() - params.frame.theta()).abs() > 1e-12
    {
        return Err(NumericsError::InvalidArgument(
            "transform parameters name a different frame than the field".into(),
        ));
    }
    let s = params.s;
    if s <= -1.0 {
        return Err(NumericsError::InvalidArgument(
            "continuation route needs order above -1".into(),
        ));
    }
    if s >= 1.0 {
        return Err(NumericsError::NonIntegrable(
            "order at or above 1 flips the reconstruction Gaussian sign".into(),
        ));
    }
    let rule = s_rule_for(field, quad);
    let value = continued_s_integral(field, s, x, p, &rule)?;
    if quad.verify {
        let fine = gauss_hermite(rule.nodes.len() * quad.refine.max(2));
        let check = continued_s_integral(field, s, x, p, &fine)?;
        if (value - check).norm() > field.tolerance().max(1e-9) * (1.0 + check.norm()) {
            return Err(NumericsError::QuadratureNonConvergence(format!(
                "transform refinement moved the result by {:.3e}",
                (value - check).norm()
            )));
        }
    }
    Ok(value)
}

/// Walk an s-ordered function down to the Husimi end of the family:
///   A_{λθ}(x,p) = (1/(π(1+s))) ∫∫ exp[−(λ⁻²Δx_θ² + λ²Δp_θ²)/(1+s)] A^{(s)}.
/// `sample` supplies A^{(s)}(x′,p′); the Gauss–Hermite substitution absorbs
/// the kernel, so the sampler is called at O(n²) displaced points.
pub fn smooth_s_to_husimi<F>(
    mut sample: F,
    params: &STransformParams,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<C64>
where
    F: FnMut(f64, f64) -> Result<C64>,
{
    quad.validate()?;
    let s = params.s;
    if s <= -1.0 {
        return Err(NumericsError::InvalidArgument(
            "smoothing requires order above -1".into(),
        ));
    }
    let frame = &params.frame;
    let lam = frame.lambda();
    let (xt, pt) = frame.rotate_real(x, p);
    let (st, ct) = frame.theta().sin_cos();
    let root = (1.0 + s).sqrt();
    let n = quad.nodes_for(0).max(40);
    let rule = gauss_hermite(n);

    let mut total = C64::new(0.0, 0.0);
    for (t1, w1) in rule.nodes.iter().zip(rule.weights.iter()) {
        let xprime_t = xt + root * lam * t1;
        for (t2, w2) in rule.nodes.iter().zip(rule.weights.iter()) {
            let pprime_t = pt + root * t2 / lam;
            let xp = ct * xprime_t - st * pprime_t;
            let pp = st * xprime_t + ct * pprime_t;
            total += C64::new(w1 * w2, 0.0) * sample(xp, pp)?;
        }
    }
    Ok(total / std::f64::consts::PI)
}

/// Verdict of the growth diagnostic for the s-ordered transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthVerdict {
    /// The probed product decays or grows at most polynomially.
    TemperedCompatible,
    /// The probed product grows like exp(c·r²) along some ray.
    ExponentialGrowth,
}

/// Ray-fit summary backing a [`GrowthVerdict`]. `gaussian_rate` is the
/// fitted coefficient of r² along the worst ray; the residuals compare that
/// model against a pure power law on the same data.
#[derive(Debug, Clone)]
pub struct SExistenceReport {
    pub verdict: GrowthVerdict,
    pub gaussian_rate: f64,
    pub power_degree: f64,
    pub gaussian_residual: f64,
    pub power_residual: f64,
}

/// Heuristic existence check: samples
///   exp[(s/(1+s))(λ⁻²x_θ² + λ²p_θ²)] · ⟨−x,−p|Â|x,p⟩
/// along four rays at the given radii and decides whether it grows like a
/// Gaussian (transform exists at most as a distribution beyond tempered
/// reach) or stays within polynomial bounds. A report, not a proof.
///
/// Pick radii past the polynomial shoulder of the truncated operator,
/// roughly r ≳ √(2·dim): inside that window |⟨−x,−p|Â|x,p⟩| still climbs
/// like r^(2(dim−1)) for *any* bounded Â, and a fit over small radii reads
/// that climb as Gaussian growth.
pub fn s_existence_diagnostic(
    field: &HusimiField,
    params: &STransformParams,
    radii: &[f64],
) -> Result<SExistenceReport> {
    if radii.len() < 3 || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(NumericsError::InvalidArgument(
            "growth diagnostic needs at least three positive radii".into(),
        ));
    }
    let s = params.s;
    if (1.0 + s).abs() < 1e-12 {
        return Err(NumericsError::InvalidArgument(
            "order -1 makes the diagnostic weight singular".into(),
        ));
    }
    let frame = field.frame();
    let lam = frame.lambda();
    let weight = s / (1.0 + s);
    let il2 = 1.0 / (lam * lam);
    let l2 = lam * lam;

    let mut worst: Option<(f64, f64, f64, f64)> = None;
    for k in 0..4 {
        let alpha = k as f64 * std::f64::consts::FRAC_PI_4;
        let (sa, ca) = alpha.sin_cos();
        let mut r2 = Vec::with_capacity(radii.len());
        let mut lnr = Vec::with_capacity(radii.len());
        let mut y = Vec::with_capacity(radii.len());
        for &r in radii {
            let (px, pp) = (r * ca, r * sa);
            let (xt, pt) = frame.rotate_real(px, pp);
            let val = offdiag_direct(
                field,
                CPhasePoint::real(-px, -pp),
                CPhasePoint::real(px, pp),
            )?;
            let ln_mag = val.norm().max(1e-300).ln() + weight * (il2 * xt * xt + l2 * pt * pt);
            r2.push(r * r);
            lnr.push(r.ln());
            y.push(ln_mag);
        }
        let (rate, res_gauss) = least_squares(&r2, &y);
        let (degree, res_pow) = least_squares(&lnr, &y);
        if worst.map_or(true, |(w, _, _, _)| rate > w) {
            worst = Some((rate, degree, res_gauss, res_pow));
        }
    }
    let (gaussian_rate, power_degree, gaussian_residual, power_residual) = worst.unwrap();
    let verdict = if gaussian_rate > 0.02 && gaussian_residual <= power_residual {
        GrowthVerdict::ExponentialGrowth
    } else {
        GrowthVerdict::TemperedCompatible
    };
    Ok(SExistenceReport {
        verdict,
        gaussian_rate,
        power_degree,
        gaussian_residual,
        power_residual,
    })
}

/// Slope and RMS residual of the one-variable least-squares line y ≈ a + b·u.
fn least_squares(u: &[f64], y: &[f64]) -> (f64, f64) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (ui, yi) in u.iter().zip(y.iter()) {
        cov += (ui - mu) * (yi - my);
        var += (ui - mu) * (ui - mu);
    }
    let b = if var > 0.0 { cov / var } else { 0.0 };
    let a = my - b * mu;
    let mut ss = 0.0;
    for (ui, yi) in u.iter().zip(y.iter()) {
        let e = yi - (a + b * ui);
        ss += e * e;
    }
    (b, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DensityOperator, SqueezedFrame};
    use crate::reconstruction::test_support::random_density;
    use crate::reconstruction::wigner_from_imaginary;
    use crate::transform::{husimi_real, FieldMode, HusimiField};
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn vacuum_op(dim: usize) -> GeneralOperator {
        GeneralOperator::from_density(&DensityOperator::fock(0, dim).unwrap())
    }

    /// Random density supported on the first `core` levels, embedded in a
    /// `dim`-level space. The zero rows past `core` give the truncation-decay
    /// probe an honest settled tail to look at.
    fn padded_random_density(
        core: usize,
        dim: usize,
        rng: &mut impl rand::Rng,
    ) -> DensityOperator {
        let small = random_density(core, rng);
        let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        m.view_mut((0, 0), (core, core)).copy_from(small.elements());
        DensityOperator::new_unchecked(m, 0.0)
    }

    #[test]
    fn direct_vacuum_closed_forms() {
        let quad = QuadratureSpec::gauss_hermite(60);
        for s in [-1.0, 0.0, 0.5] {
            let params = STransformParams::new(s, SqueezedFrame::reference())
                .unwrap()
                .allow_nonnegative_order();
            for (x, p) in [(0.0, 0.0), (0.6, -0.8)] {
                let got = s_transform_direct(&vacuum_op(2), &params, x, p, &quad).unwrap();
                let expect = 1.0 / (std::f64::consts::PI * (1.0 - s))
                    * (-(x * x + p * p) / (1.0 - s)).exp();
                assert!(
                    (got.re - expect).abs() < 1e-8 && got.im.abs() < 1e-10,
                    "s={s} ({x},{p}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn direct_matches_continuation_route() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(13);
        let rho = padded_random_density(4, 6, &mut rng);
        let frame = SqueezedFrame::new(0.8, 0.3).unwrap();
        let field = HusimiField::from_density(frame.clone(), &rho);
        let quad = QuadratureSpec::gauss_hermite(70);
        let params = STransformParams::new(0.25, frame)
            .unwrap()
            .allow_nonnegative_order();
        let direct = s_transform_direct(
            &GeneralOperator::from_density(&rho),
            &params,
            0.5,
            -0.3,
            &quad,
        )
        .unwrap();
        let cont = s_transform_from_continuation(&field, &params, 0.5, -0.3, &quad).unwrap();
        assert!(
            (direct - cont).norm() < 1e-8,
            "direct {direct} vs continuation {cont}"
        );
    }

    #[test]
    fn direct_equals_husimi_at_minus_one() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        let rho = padded_random_density(4, 6, &mut rng);
        let frame = SqueezedFrame::new(0.8, 0.3).unwrap();
        let field = HusimiField::from_density(frame.clone(), &rho);
        let params = STransformParams::new(-1.0, frame).unwrap();
        let quad = QuadratureSpec::gauss_hermite(70);
        for (x, p) in [(0.4, 0.2), (-0.9, 0.6)] {
            let got = s_transform_direct(
                &GeneralOperator::from_density(&rho),
                &params,
                x,
                p,
                &quad,
            )
            .unwrap();
            let expect = husimi_real(&field, x, p).unwrap();
            assert!((got - expect).norm() < 1e-8, "({x},{p}): {got} vs {expect}");
        }
    }

    #[test]
    fn refusals() {
        let quad = QuadratureSpec::default();
        let frame = SqueezedFrame::reference();
        // identity: mass at the truncation boundary
        let params = STransformParams::new(-0.5, frame.clone()).unwrap();
        let got = s_transform_direct(&GeneralOperator::identity(8), &params, 0.0, 0.0, &quad);
        assert!(matches!(got, Err(NumericsError::NonIntegrable(_))));
        // s >= 0 without the override
        let params = STransformParams::new(0.0, frame.clone()).unwrap();
        let got = s_transform_direct(&vacuum_op(2), &params, 0.0, 0.0, &quad);
        assert!(matches!(got, Err(NumericsError::NonIntegrable(_))));
        // s >= 1 even with the override
        let params = STransformParams::new(1.0, frame.clone())
            .unwrap()
            .allow_nonnegative_order();
        let got = s_transform_direct(&vacuum_op(2), &params, 0.0, 0.0, &quad);
        assert!(matches!(got, Err(NumericsError::NonIntegrable(_))));
        // continuation route: s >= 1 refused, mismatched frame refused
        let rho = DensityOperator::fock(0, 2).unwrap();
        let field = HusimiField::from_density(frame.clone(), &rho);
        let params = STransformParams::new(1.0, frame.clone()).unwrap();
        let got = s_transform_from_continuation(&field, &params, 0.0, 0.0, &quad);
        assert!(matches!(got, Err(NumericsError::NonIntegrable(_))));
        let other = STransformParams::new(0.0, SqueezedFrame::new(2.0, 0.0).unwrap()).unwrap();
        let got = s_transform_from_continuation(&field, &other, 0.0, 0.0, &quad);
        assert!(matches!(got, Err(NumericsError::InvalidArgument(_))));
        // orders below -1 rejected at construction
        assert!(STransformParams::new(-1.5, frame).is_err());
    }

    #[test]
    fn continuation_vacuum_half_order() {
        let rho = DensityOperator::fock(0, 2).unwrap();
        let frame = SqueezedFrame::reference();
        let field = HusimiField::from_density(frame.clone(), &rho);
        let params = STransformParams::new(0.5, frame).unwrap();
        let quad = QuadratureSpec::default();
        for (x, p) in [(0.0, 0.0), (0.7, -0.4)] {
            let got = s_transform_from_continuation(&field, &params, x, p, &quad).unwrap();
            let expect = 2.0 / std::f64::consts::PI * (-2.0 * (x * x + p * p)).exp();
            assert!(
                (got.re - expect).abs() < 1e-10 && got.im.abs() < 1e-10,
                "({x},{p}): {got} vs {expect}"
            );
        }
    }

    #[test]
    fn continuation_zero_order_is_wigner() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(29);
        let rho = random_density(5, &mut rng);
        let frame = SqueezedFrame::new(1.2, 0.7).unwrap();
        let field = HusimiField::from_density(frame.clone(), &rho);
        let params = STransformParams::new(0.0, frame).unwrap();
        let quad = QuadratureSpec::default();
        for (x, p) in [(0.3, 0.4), (-1.0, 0.8)] {
            let a = s_transform_from_continuation(&field, &params, x, p, &quad).unwrap();
            let w = wigner_from_imaginary(&field, x, p, &quad).unwrap();
            assert!((a.re - w).abs() < 1e-8 && a.im.abs() < 1e-8);
        }
    }

    /// Family nesting: smoothing A^{(s)} with the matching order must land on
    /// the transform itself, for every order and both sampler routes.
    #[test]
    fn smoothing_recovers_transform() {
        let quad = QuadratureSpec::default();

        // Gaussian test states: vacuum in a squeezed frame, thermal mixture.
        let mut cases: Vec<(DensityOperator, SqueezedFrame)> = vec![(
            DensityOperator::fock(0, 4).unwrap(),
            SqueezedFrame::new(0.9, 0.4).unwrap(),
        )];
        let mut thermal = nalgebra::DMatrix::<C64>::zeros(8, 8);
        let mean = 0.35f64;
        let q = mean / (1.0 + mean);
        let norm: f64 = (0..8).map(|n| q.powi(n as i32)).sum();
        for n in 0..8 {
            thermal[(n, n)] = C64::new(q.powi(n as i32) / norm, 0.0);
        }
        cases.push((
            DensityOperator::new_unchecked(thermal, 0.0),
            SqueezedFrame::new(1.2, 0.0).unwrap(),
        ));

        for (rho, frame) in cases {
            let field = HusimiField::from_density(frame.clone(), &rho);
            for s in [-0.5, 0.0, 0.5] {
                let params = STransformParams::new(s, frame.clone()).unwrap();
                for (x, p) in [(0.2, -0.4), (0.9, 0.6)] {
                    let inner_params = params.clone();
                    let inner_field = &field;
                    let got = smooth_s_to_husimi(
                        |xp, pp| {
                            s_transform_from_continuation(
                                inner_field,
                                &inner_params,
                                xp,
                                pp,
                                &quad,
                            )
                        },
                        &params,
                        x,
                        p,
                        &quad,
                    )
                    .unwrap();
                    let expect = husimi_real(&field, x, p).unwrap();
                    assert!(
                        (got - expect).norm() < 1e-5,
                        "s={s} ({x},{p}): smoothed {got} vs direct {expect}"
                    );
                }
            }
        }
    }

    /// Smoothing the *direct* route at s = 0 must also land on the transform.
    #[test]
    fn smoothing_direct_wigner_consistency() {
        let quad = QuadratureSpec::gauss_hermite(48);
        let frame = SqueezedFrame::reference();
        let rho = DensityOperator::fock(0, 2).unwrap();
        let field = HusimiField::from_density(frame.clone(), &rho);
        let op = GeneralOperator::from_density(&rho);
        let params = STransformParams::new(0.0, frame)
            .unwrap()
            .allow_nonnegative_order();
        let got = smooth_s_to_husimi(
            |xp, pp| s_transform_direct(&op, &params, xp, pp, &quad),
            &params,
            0.5,
            -0.2,
            &quad,
        )
        .unwrap();
        let expect = husimi_real(&field, 0.5, -0.2).unwrap();
        assert!((got - expect).norm() < 1e-6, "{got} vs {expect}");
    }

    #[test]
    fn existence_diagnostic_verdicts() {
        // past the polynomial shoulder r ≈ √(2·dim) of the largest state below
        let radii: Vec<f64> = (0..7).map(|i| 4.0 + i as f64).collect();
        let frame = SqueezedFrame::reference();
        let vac = DensityOperator::fock(0, 2).unwrap();
        let field = HusimiField::from_density(frame.clone(), &vac);

        // vacuum at s=0 decays
        let params = STransformParams::new(0.0, frame.clone()).unwrap();
        let report = s_existence_diagnostic(&field, &params, &radii).unwrap();
        assert_eq!(report.verdict, GrowthVerdict::TemperedCompatible);
        assert!(report.gaussian_rate < 0.0);

        // weight s/(1+s) = 0.75 beats the vacuum's 1/2 decay rate
        let params = STransformParams::new(3.0, frame.clone()).unwrap();
        let report = s_existence_diagnostic(&field, &params, &radii).unwrap();
        assert_eq!(report.verdict, GrowthVerdict::ExponentialGrowth);
        assert_relative_eq!(report.gaussian_rate, 0.25, epsilon = 0.02);

        // bounded random states at s=0 stay tempered-compatible
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(37);
        for dim in [4usize, 9, 12] {
            let rho = random_density(dim, &mut rng);
            let f = HusimiField::from_density(frame.clone(), &rho);
            let params = STransformParams::new(0.0, frame.clone()).unwrap();
            let report = s_existence_diagnostic(&f, &params, &radii).unwrap();
            assert_eq!(report.verdict, GrowthVerdict::TemperedCompatible, "dim={dim}");
        }
    }

    #[test]
    fn operator_mode_follows_input_normalization() {
        // same matrix through density and operator modes: operator-mode
        // result is 2π times the density-mode one.
        let rho = DensityOperator::fock(1, 3).unwrap();
        let frame = SqueezedFrame::reference();
        let fd = HusimiField::from_density(frame.clone(), &rho);
        let fo = fd.clone().as_operator_mode();
        let params = STransformParams::new(0.3, frame).unwrap();
        let quad = QuadratureSpec::default();
        let d = s_transform_from_continuation(&fd, &params, 0.4, 0.1, &quad).unwrap();
        let o = s_transform_from_continuation(&fo, &params, 0.4, 0.1, &quad).unwrap();
        assert!((o - d * 2.0 * std::f64::consts::PI).norm() < 1e-12);
        assert_eq!(fd.mode(), FieldMode::Density);
    }
}
