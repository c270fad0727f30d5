//! The Wigner function from imaginary-argument values of the continued
//! transform, plus the dual check: re-deriving the transform by convolving
//! the Wigner function with the frame's Gaussian kernel.
//!
//! The underlying identity expresses W (and more generally every s-ordered
//! function with s < 1) as a Gaussian integral of Q^c(ix′, ip′) divided by a
//! Gaussian prefactor. After shifting both Gauss–Hermite contours to absorb
//! the Fourier phase, the exponential of the continuation cancels the kernel
//! Gaussian *identically* — the integrand collapses to the bare double power
//! series, a polynomial — so a rule with `dim + 6` nodes is exact to
//! rounding, at every phase-space point. The divided prefactor is folded
//! into a net exponent that always decays:
//!   −(λ⁻²x_θ² + λ²p_θ²)/(1−s).

use num_complex::Complex64 as C64;

use crate::error::{NumericsError, Result};
use crate::fock::{rotate_quadratures, CPhasePoint, SqueezedFrame};
use crate::transform::quadrature::{gauss_hermite, GaussHermite};
use crate::transform::{FieldMode, HusimiField, QuadratureSpec};
use crate::util::linspace;

use super::{series_value, PREFACTOR_GUARD};

/// Shared engine for the s-ordered family (−1 < s < 1) reconstructed from the
/// continued transform; s = 0 is the Wigner function. Exact for truncated
/// states once the rule has at least `dim` nodes. Output normalization
/// follows the field mode (density mode: unit total mass at s = 0).
pub(super) fn continued_s_integral(
    field: &HusimiField,
    s: f64,
    x: f64,
    p: f64,
    rule: &GaussHermite,
) -> Result<C64> {
    let frame = field.frame();
    let lam = frame.lambda();
    let (xt, pt) = frame.rotate_real(x, p);
    let il2 = 1.0 / (lam * lam);
    let l2 = lam * lam;

    let divided = (il2 * xt * xt + l2 * pt * pt) / (1.0 + s);
    if divided > PREFACTOR_GUARD {
        return Err(NumericsError::RangeGuard {
            exponent: divided,
            context: "s-family Gaussian prefactor division".into(),
        });
    }

    let gx = (1.0 - s) / (2.0 * (1.0 + s)) * il2;
    let gp = l2 * (1.0 - s) / (2.0 * (1.0 + s));
    let omega_x = 2.0 * xt * il2 / (1.0 + s);
    let omega_p = 2.0 * l2 * pt / (1.0 + s);
    let a0 = C64::new(0.0, -omega_x / (2.0 * gx));
    let b0 = C64::new(0.0, -omega_p / (2.0 * gp));
    let (sx, sp) = (gx.sqrt().recip(), gp.sqrt().recip());

    let mut total = C64::new(0.0, 0.0);
    for (tj, wj) in rule.nodes.iter().zip(rule.weights.iter()) {
        let a = a0 + C64::new(sx * tj, 0.0);
        let mut row = C64::new(0.0, 0.0);
        for (tk, wk) in rule.nodes.iter().zip(rule.weights.iter()) {
            let b = b0 + C64::new(sp * tk, 0.0);
            // the slice point i·R_{−θ}(a, b); its continuation envelope
            // exp(+(λ⁻²a² + λ²b²)/2) cancels the kernel Gaussian exactly,
            // leaving the bare series.
            let (px, pp) = rotate_quadratures(a, b, -frame.theta());
            let (zm, zp) = frame.z_pm(CPhasePoint::new(C64::i() * px, C64::i() * pp));
            row += C64::new(*wk, 0.0) * series_value(field, zm, zp);
        }
        total += C64::new(*wj, 0.0) * row;
    }
    let net = -(il2 * xt * xt + l2 * pt * pt) / (1.0 - s);
    let norm = 1.0 / (std::f64::consts::PI * (1.0 + s) * (gx * gp).sqrt());
    Ok(total * norm * net.exp())
}

pub(super) fn s_rule_for(field: &HusimiField, quad: &QuadratureSpec) -> GaussHermite {
    gauss_hermite(quad.nodes_for(0).max(field.dim() + 6))
}

/// W(x,p) from a density-mode field, by the imaginary-argument inversion
/// integral. The result is checked to be real to 1e-8 residual.
pub fn wigner_from_imaginary(
    field: &HusimiField,
    x: f64,
    p: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if field.mode() != FieldMode::Density {
        return Err(NumericsError::InvalidArgument(
            "Wigner reconstruction expects a density-mode field".into(),
        ));
    }
    quad.validate()?;
    let rule = s_rule_for(field, quad);
    let value = continued_s_integral(field, 0.0, x, p, &rule)?;
    if quad.verify {
        let fine = gauss_hermite(rule.nodes.len() * quad.refine.max(2));
        let check = continued_s_integral(field, 0.0, x, p, &fine)?;
        if (value - check).norm() > field.tolerance().max(1e-9) * (1.0 + check.norm()) {
            return Err(NumericsError::QuadratureNonConvergence(format!(
                "Wigner refinement moved the result by {:.3e}",
                (value - check).norm()
            )));
        }
    }
    if value.im.abs() > 1e-8 * value.re.abs().max(1.0) {
        return Err(NumericsError::QuadratureNonConvergence(format!(
            "Wigner value has imaginary residual {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// A rectangular sample of the Wigner function, row-major over x.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    xs: Vec<f64>,
    ps: Vec<f64>,
    values: Vec<f64>,
}

impl WignerGrid {
    /// Evaluate W on a uniform grid [−hx, hx] × [−hp, hp]. The quadrature
    /// rule is built once and shared across points.
    pub fn compute(
        field: &HusimiField,
        half_x: f64,
        half_p: f64,
        nx: usize,
        np: usize,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        if field.mode() != FieldMode::Density {
            return Err(NumericsError::InvalidArgument(
                "Wigner reconstruction expects a density-mode field".into(),
            ));
        }
        if nx < 2 || np < 2 || !(half_x > 0.0) || !(half_p > 0.0) {
            return Err(NumericsError::InvalidArgument(
                "Wigner grid needs at least 2x2 points and positive extents".into(),
            ));
        }
        quad.validate()?;
        let rule = s_rule_for(field, quad);
        let xs = linspace(-half_x, half_x, nx);
        let ps = linspace(-half_p, half_p, np);
        let mut values = Vec::with_capacity(nx * np);
        for &x in &xs {
            for &p in &ps {
                let v = continued_s_integral(field, 0.0, x, p, &rule)?;
                if v.im.abs() > 1e-8 * v.re.abs().max(1.0) {
                    return Err(NumericsError::QuadratureNonConvergence(format!(
                        "Wigner grid value at ({x:.3},{p:.3}) has imaginary residual {:.3e}",
                        v.im
                    )));
                }
                values.push(v.re);
            }
        }
        Ok(Self { xs, ps, values })
    }

    /// Wrap externally produced samples (axes must be strictly increasing,
    /// `values` row-major over x with length nx·np).
    pub fn from_parts(xs: Vec<f64>, ps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || ps.len() < 2 || values.len() != xs.len() * ps.len() {
            return Err(NumericsError::InvalidArgument(
                "grid axes and value count are inconsistent".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) || ps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NumericsError::InvalidArgument(
                "grid axes must be strictly increasing".into(),
            ));
        }
        Ok(Self { xs, ps, values })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.ps.len() + ip]
    }

    /// Trapezoid mass of the sampled function; 1 within the declared
    /// tolerance when the grid covers the state's support.
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for ix in 0..self.xs.len() {
            let wx = trapezoid_weight(&self.xs, ix);
            for ip in 0..self.ps.len() {
                total += wx * trapezoid_weight(&self.ps, ip) * self.value(ix, ip);
            }
        }
        total
    }

    /// Bilinear interpolation; None outside the grid hull.
    pub fn interpolate(&self, x: f64, p: f64) -> Option<f64> {
        let ix = bracket(&self.xs, x)?;
        let ip = bracket(&self.ps, p)?;
        let tx = (x - self.xs[ix]) / (self.xs[ix + 1] - self.xs[ix]);
        let tp = (p - self.ps[ip]) / (self.ps[ip + 1] - self.ps[ip]);
        let v00 = self.value(ix, ip);
        let v01 = self.value(ix, ip + 1);
        let v10 = self.value(ix + 1, ip);
        let v11 = self.value(ix + 1, ip + 1);
        Some(v00 * (1.0 - tx) * (1.0 - tp) + v01 * (1.0 - tx) * tp + v10 * tx * (1.0 - tp) + v11 * tx * tp)
    }
}

fn trapezoid_weight(axis: &[f64], i: usize) -> f64 {
    let lo = if i == 0 { axis[0] } else { axis[i - 1] };
    let hi = if i + 1 == axis.len() { axis[i] } else { axis[i + 1] };
    0.5 * (hi - lo)
}

fn bracket(axis: &[f64], v: f64) -> Option<usize> {
    if v < axis[0] || v > *axis.last().unwrap() {
        return None;
    }
    let i = axis.partition_point(|&a| a <= v);
    Some(i.saturating_sub(1).min(axis.len() - 2))
}

/// Re-derive the transform value at (x,p) by convolving a Wigner sample with
/// the frame's Gaussian kernel:
///   Q(x,p) = (1/π) ∫∫ exp[−(x′_θ−x_θ)²/λ² − λ²(p′_θ−p_θ)²] W dx′dp′.
/// The grid must cover the kernel's effective support (5.5 widths) around
/// (x,p) and resolve the narrower kernel axis.
pub fn q_via_wigner_convolution(
    w: &WignerGrid,
    frame: &SqueezedFrame,
    x: f64,
    p: f64,
) -> Result<f64> {
    let lam = frame.lambda();
    let sig_x = lam / std::f64::consts::SQRT_2;
    let sig_p = 1.0 / (lam * std::f64::consts::SQRT_2);
    let (st, ct) = frame.theta().sin_cos();

    let reach = 5.5;
    let corners = [
        (x + reach * sig_x * ct, p + reach * sig_x * st),
        (x - reach * sig_x * ct, p - reach * sig_x * st),
        (x - reach * sig_p * st, p + reach * sig_p * ct),
        (x + reach * sig_p * st, p - reach * sig_p * ct),
    ];
    let (x_lo, x_hi) = (w.xs[0], *w.xs.last().unwrap());
    let (p_lo, p_hi) = (w.ps[0], *w.ps.last().unwrap());
    for (cx, cp) in corners {
        if cx < x_lo || cx > x_hi || cp < p_lo || cp > p_hi {
            return Err(NumericsError::InsufficientSupport(format!(
                "kernel support reaches ({cx:.2},{cp:.2}) outside the grid"
            )));
        }
    }
    let max_dx = w.xs.windows(2).map(|v| v[1] - v[0]).fold(0.0, f64::max);
    let max_dp = w.ps.windows(2).map(|v| v[1] - v[0]).fold(0.0, f64::max);
    let narrow = sig_x.min(sig_p);
    if max_dx.max(max_dp) > 1.5 * narrow {
        return Err(NumericsError::InsufficientSupport(format!(
            "grid spacing {:.3} too coarse for kernel width {:.3}",
            max_dx.max(max_dp),
            narrow
        )));
    }

    let (xt, pt) = frame.rotate_real(x, p);
    let il2 = 1.0 / (lam * lam);
    let l2 = lam * lam;
    let mut total = 0.0;
    for (ix, &xp) in w.xs.iter().enumerate() {
        let wx = trapezoid_weight(&w.xs, ix);
        for (ip, &pp) in w.ps.iter().enumerate() {
            let (xpt, ppt) = frame.rotate_real(xp, pp);
            let ex = -il2 * (xpt - xt) * (xpt - xt) - l2 * (ppt - pt) * (ppt - pt);
            if ex < -700.0 {
                continue;
            }
            total += wx * trapezoid_weight(&w.ps, ip) * ex.exp() * w.value(ix, ip);
        }
    }
    Ok(total / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DensityOperator;
    use crate::reconstruction::test_support::{direct_wigner, random_density};
    use crate::reconstruction::xphi_element;
    use crate::transform::husimi_real;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn vacuum_and_fock_one_closed_values() {
        let quad = QuadratureSpec::default();
        let vac = DensityOperator::fock(0, 2).unwrap();
        let field = HusimiField::from_density(SqueezedFrame::reference(), &vac);
        let inv_pi = 1.0 / std::f64::consts::PI;
        for (x, p) in [(0.0, 0.0), (0.7, -0.4), (1.5, 1.1)] {
            let got = wigner_from_imaginary(&field, x, p, &quad).unwrap();
            assert_relative_eq!(got, inv_pi * (-x * x - p * p).exp(), epsilon = 1e-10);
        }
        let one = DensityOperator::fock(1, 3).unwrap();
        let field = HusimiField::from_density(SqueezedFrame::reference(), &one);
        let got = wigner_from_imaginary(&field, 0.0, 0.0, &quad).unwrap();
        assert_relative_eq!(got, -inv_pi, epsilon = 1e-10);
    }

    #[test]
    fn matches_direct_integral_oracle() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let quad = QuadratureSpec::default();
        for &(lam, theta) in &[(1.0, 0.0), (0.6, 0.5), (1.7, 0.0)] {
            let rho = random_density(5, &mut rng);
            let frame = SqueezedFrame::new(lam, theta).unwrap();
            let field = HusimiField::from_density(frame.clone(), &rho);
            for &x in &[-1.5, 0.0, 1.5] {
                for &p in &[-1.5, 0.3, 1.5] {
                    let got = wigner_from_imaginary(&field, x, p, &quad).unwrap();
                    let orc = direct_wigner(&rho, &frame, x, p);
                    assert!(
                        (got - orc).abs() < 1e-5,
                        "lam={lam} theta={theta} ({x},{p}): {got} vs {orc}"
                    );
                }
            }
        }
    }

    #[test]
    fn grid_mass_and_interpolation() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let rho = random_density(4, &mut rng);
        let field = HusimiField::from_density(SqueezedFrame::reference(), &rho);
        let grid =
            WignerGrid::compute(&field, 6.0, 6.0, 61, 61, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(grid.integral(), 1.0, epsilon = 1e-5);
        // interpolation agrees with a direct evaluation mid-cell
        let direct =
            wigner_from_imaginary(&field, 0.31, -0.57, &QuadratureSpec::default()).unwrap();
        let interp = grid.interpolate(0.31, -0.57).unwrap();
        assert!((interp - direct).abs() < 5e-3);
        assert!(grid.interpolate(7.0, 0.0).is_none());
    }

    #[test]
    fn marginal_matches_position_diagonal() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let rho = random_density(5, &mut rng);
        let frame = SqueezedFrame::new(0.8, 0.6).unwrap();
        let field = HusimiField::from_density(frame, &rho);
        let quad = QuadratureSpec::default();
        for &x in &[0.4, -0.8] {
            let ps = linspace(-7.0, 7.0, 141);
            let mut marginal = 0.0;
            for (i, &p) in ps.iter().enumerate() {
                marginal +=
                    trapezoid_weight(&ps, i) * wigner_from_imaginary(&field, x, p, &quad).unwrap();
            }
            let diag = xphi_element(&field, 0.0, x, 0.0, &quad).unwrap();
            assert!(
                (marginal - diag.re).abs() < 1e-5,
                "x={x}: marginal {marginal} vs diagonal {}",
                diag.re
            );
        }
    }

    #[test]
    fn convolution_returns_transform() {
        let quad = QuadratureSpec::default();
        // vacuum, reference frame: closed-form cross-check
        let vac = DensityOperator::fock(0, 2).unwrap();
        let field = HusimiField::from_density(SqueezedFrame::reference(), &vac);
        let grid = WignerGrid::compute(&field, 7.0, 7.0, 101, 101, &quad).unwrap();
        for (x, p) in [(0.0, 0.0), (0.8, -0.6)] {
            let got = q_via_wigner_convolution(&grid, field.frame(), x, p).unwrap();
            let expect = (-(x * x + p * p) / 2.0).exp() / (2.0 * std::f64::consts::PI);
            assert!((got - expect).abs() < 1e-6, "({x},{p}): {got} vs {expect}");
        }
        // Fock-1 in a squeezed frame against husimi_real
        let one = DensityOperator::fock(1, 3).unwrap();
        let frame = SqueezedFrame::new(0.7, 0.3).unwrap();
        let field = HusimiField::from_density(frame.clone(), &one);
        let grid = WignerGrid::compute(&field, 7.5, 7.5, 121, 121, &quad).unwrap();
        for (x, p) in [(0.0, 0.0), (0.5, 0.9)] {
            let got = q_via_wigner_convolution(&grid, &frame, x, p).unwrap();
            let expect = husimi_real(&field, x, p).unwrap().re;
            assert!((got - expect).abs() < 1e-6, "({x},{p}): {got} vs {expect}");
        }
    }

    #[test]
    fn convolution_refuses_insufficient_grids() {
        let quad = QuadratureSpec::default();
        let vac = DensityOperator::fock(0, 2).unwrap();
        let field = HusimiField::from_density(SqueezedFrame::reference(), &vac);
        let small = WignerGrid::compute(&field, 2.0, 2.0, 41, 41, &quad).unwrap();
        let got = q_via_wigner_convolution(&small, field.frame(), 0.0, 0.0);
        assert!(matches!(got, Err(NumericsError::InsufficientSupport(_))));
        let coarse = WignerGrid::compute(&field, 7.0, 7.0, 8, 8, &quad).unwrap();
        let got = q_via_wigner_convolution(&coarse, field.frame(), 0.0, 0.0);
        assert!(matches!(got, Err(NumericsError::InsufficientSupport(_))));
    }
}
