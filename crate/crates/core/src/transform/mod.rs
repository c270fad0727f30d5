//! The generalized Husimi transform, its holomorphic continuation to
//! complexified phase space, and the inversion machinery built on it.
//!
//! A [`HusimiField`] bundles a frame with a number-basis matrix. In density
//! mode values carry the 1/2π normalization (a probability density over
//! phase space); operator mode returns bare expectations ⟨x,p|Â|x,p⟩. The
//! continuation replaces the conjugate pair (z̄, z) by independent complex
//! variables (z₋, z₊), which is what makes off-diagonal matrix elements —
//! and hence full state reconstruction — reachable from the transform.

use nalgebra::DMatrix;

use crate::error::{NumericsError, Result};
use crate::fock::{
    coherent_amplitudes, estimate_growth, CPhasePoint, ConvergenceEstimate, DensityOperator,
    GeneralOperator, SqueezedFrame, C64,
};
use crate::util::ln_factorial;

pub mod antihusimi;
pub mod expectation;
pub mod inversion;
pub mod quadrature;

pub use antihusimi::{expectation_antihusimi, AntiHusimiSeries};
pub use expectation::expectation_full;
pub use inversion::reconstruct_density;
pub use quadrature::{gauss_hermite, GaussHermite, QuadratureScheme, QuadratureSpec};

/// Normalization convention of a field's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldMode {
    /// 1/2π prefactor: values integrate to the trace over the real plane.
    Density,
    /// Bare sandwich ⟨x,p|Â|x,p⟩, no prefactor.
    Operator,
}

/// What the field was built from.
#[derive(Debug, Clone)]
pub enum FieldSource {
    Density(DensityOperator),
    Operator(GeneralOperator),
}

/// A generalized Husimi function: frame + number-basis matrix + mode.
#[derive(Debug, Clone)]
pub struct HusimiField {
    frame: SqueezedFrame,
    source: FieldSource,
    mode: FieldMode,
    growth: Option<ConvergenceEstimate>,
    growth_override: bool,
    tolerance: f64,
}

impl HusimiField {
    /// Density-mode field; the matrix must be in the frame's number basis.
    pub fn from_density(frame: SqueezedFrame, rho: &DensityOperator) -> Self {
        Self {
            frame,
            source: FieldSource::Density(rho.clone()),
            mode: FieldMode::Density,
            growth: None,
            growth_override: false,
            tolerance: 1e-9,
        }
    }

    /// Operator-mode field; the matrix must be in the frame's number basis.
    /// Runs the growth-condition fit (matrices smaller than 4×4 pass
    /// trivially — any finite matrix is bounded).
    pub fn from_operator(frame: SqueezedFrame, op: &GeneralOperator) -> Self {
        let growth = if op.growth_bound().is_some() || op.dim() < 4 {
            None
        } else {
            estimate_growth(op.elements()).ok()
        };
        Self {
            frame,
            source: FieldSource::Operator(op.clone()),
            mode: FieldMode::Operator,
            growth,
            growth_override: false,
            tolerance: 1e-9,
        }
    }

    /// Same matrix, bare-sandwich values (drops the 1/2π convention).
    pub fn as_operator_mode(mut self) -> Self {
        self.mode = FieldMode::Operator;
        self
    }

    /// Accept continuation of a source whose growth fit failed.
    pub fn with_growth_override(mut self) -> Self {
        self.growth_override = true;
        self
    }

    /// Tolerance used by the Fock-sum tail-bound signal (default 1e-9).
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn frame(&self) -> &SqueezedFrame {
        &self.frame
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn source(&self) -> &FieldSource {
        &self.source
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn growth_estimate(&self) -> Option<&ConvergenceEstimate> {
        self.growth.as_ref()
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        match &self.source {
            FieldSource::Density(rho) => rho.elements(),
            FieldSource::Operator(op) => op.elements(),
        }
    }

    pub fn dim(&self) -> usize {
        self.elements().nrows()
    }

    fn declared_tail(&self) -> f64 {
        match &self.source {
            FieldSource::Density(rho) => rho.declared_tail(),
            FieldSource::Operator(_) => 0.0,
        }
    }

    fn mode_prefactor(&self) -> f64 {
        match self.mode {
            FieldMode::Density => 0.5 / std::f64::consts::PI,
            FieldMode::Operator => 1.0,
        }
    }

    fn growth_condition_ok(&self) -> bool {
        if self.growth_override {
            return true;
        }
        match &self.source {
            FieldSource::Density(_) => true,
            FieldSource::Operator(op) => {
                op.growth_bound().is_some()
                    || op.dim() < 4
                    || self.growth.as_ref().map(|g| g.passes).unwrap_or(false)
            }
        }
    }

    /// Convenience: density-mode value as a plain real number.
    pub fn density_value(&self, x: f64, p: f64) -> Result<f64> {
        match self.mode {
            FieldMode::Density => Ok(husimi_real(self, x, p)?.re),
            FieldMode::Operator => Err(NumericsError::InvalidArgument(
                "density_value requires a density-mode field".into(),
            )),
        }
    }
}

/// min(1, e^{−s} Σ_{k≥n} s^k/k!) — the probability mass a coherent state of
/// energy s = |z|² carries on the levels a dim-n block cannot represent.
/// Bounded by the first omitted term times a geometric factor when s < n,
/// and by the trivial cap 1 otherwise.
fn poisson_tail(s: f64, n: usize) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    if s >= nf {
        return 1.0;
    }
    let ln_t = -s + nf * s.ln() - ln_factorial(n);
    let r = s / (nf + 1.0);
    ((ln_t - (1.0 - r).ln()).exp()).min(1.0)
}

/// ⟨x,p|Â|x,p⟩ at a real phase point by the double Fock sum, with the mode
/// prefactor applied. Density mode returns a real value (zero imaginary
/// part) and signals when the truncation-tail bound exceeds the field's
/// tolerance.
pub fn husimi_real(field: &HusimiField, x: f64, p: f64) -> Result<C64> {
    if !(x.is_finite() && p.is_finite()) {
        return Err(NumericsError::InvalidArgument(format!(
            "husimi_real needs finite coordinates, got ({x}, {p})"
        )));
    }
    let n = field.dim();
    let c = coherent_amplitudes(&field.frame, CPhasePoint::real(x, p), n)?;
    let a = field.elements();
    // Diagonal-ordered accumulation (increasing n+m) controls cancellation.
    let mut total = C64::new(0.0, 0.0);
    for s in 0..(2 * n - 1) {
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        let mut diag = C64::new(0.0, 0.0);
        for i in lo..=hi {
            diag += c[i].conj() * a[(i, s - i)] * c[s - i];
        }
        total += diag;
    }
    let pref = field.mode_prefactor();

    // Tail signal. Split |z⟩ = P|z⟩ + T|z⟩ into block and tail projections:
    // the computed sum is exactly ⟨Pz|ρ|Pz⟩, and with tr(TρT) ≤ ε (the
    // declared tail) Cauchy–Schwarz bounds the missing cross and tail-tail
    // contributions by 2√(⟨Pz|ρ|Pz⟩·ε·τ) + ε·τ, where τ = ‖T|z⟩‖² is the
    // coherent mass beyond the block. The bound scales with the value and
    // the local tail mass, so it fires only where the truncation genuinely
    // clouds the answer. Zero declared tail means the block is the whole
    // operator and the finite sum is exact.
    if matches!(field.mode, FieldMode::Density) {
        let tail_mass = field.declared_tail();
        if tail_mass > 0.0 {
            let z = field.frame.z(x, p);
            let tau = poisson_tail(z.norm_sqr(), n);
            let v_pos = total.re.max(0.0);
            let bound = pref * (2.0 * (v_pos * tail_mass * tau).sqrt() + tail_mass * tau);
            if bound > field.tolerance {
                return Err(NumericsError::Truncation {
                    bound,
                    tol: field.tolerance,
                });
            }
        }
        let v = total * pref;
        debug_assert!(v.im.abs() < 1e-10, "imaginary residue {:.3e}", v.im);
        return Ok(C64::new(v.re, 0.0));
    }
    Ok(total * pref)
}

const EXP_GUARD: f64 = 660.0;

/// The holomorphic continuation exp(−z₋z₊) Σ z₋ⁿ z₊ᵐ/√(n!m!) A_{nm} at a
/// complexified phase point. Requires the growth condition (or an explicit
/// override); restricted to real points it reduces to [`husimi_real`].
/// Signals when the declared-tail uncertainty bound exceeds the field's
/// tolerance — at deep complex points that bound is exponentially amplified
/// (this is intrinsic to the continuation, not an artifact of the method).
pub fn husimi_continued(field: &HusimiField, pt: CPhasePoint) -> Result<C64> {
    let (value, bound) = continued_with_tail(field, pt)?;
    if bound > field.tolerance {
        return Err(NumericsError::Truncation {
            bound,
            tol: field.tolerance,
        });
    }
    Ok(value)
}

/// Continuation value together with its declared-tail uncertainty bound (0
/// when no tail is declared). Integration routines that account for the
/// tail in aggregate use this instead of the signaling wrapper.
///
/// The bound comes from the block/tail split of the double sum: rows or
/// columns beyond the block contribute at most
/// e^{(s₋+s₊)/2}|e^{−z₋z₊}| · [√ε(√(g₋τ₊) + √(g₊τ₋)) + ε√(τ₋τ₊)]
/// with τ± the coherent tail masses at s± = |z±|² and g± ≤ 1 the state's
/// mass seen along each ladder, g = e^{−s}(Σₙ |z|ⁿ√ρₙₙ/√n!)² ≥ the
/// block quadratic form by Schur positivity (Cauchy–Schwarz with
/// tr(TρT) ≤ ε). The g factors make the bound track the state: far from
/// its support they are exponentially small, so the certified uncertainty
/// stays near ε instead of √ε. Evaluated in log space so the envelope and
/// the tiny tail factors cannot overflow or underflow separately.
pub(crate) fn continued_with_tail(field: &HusimiField, pt: CPhasePoint) -> Result<(C64, f64)> {
    if !field.growth_condition_ok() {
        let alpha = field
            .growth
            .as_ref()
            .map(|g| g.alpha_fit)
            .unwrap_or(f64::NAN);
        return Err(NumericsError::GrowthCondition { alpha_fit: alpha });
    }
    let (zm, zp) = field.frame.z_pm(pt);
    let s_m = zm.norm_sqr();
    let s_p = zp.norm_sqr();
    let cross = zm * zp;
    let envelope = 0.5 * (s_m + s_p) - cross.re;
    if 0.5 * (s_m + s_p) > EXP_GUARD || cross.re.abs() > EXP_GUARD || envelope > EXP_GUARD {
        return Err(NumericsError::RangeGuard {
            exponent: envelope.max(0.5 * (s_m + s_p)),
            context: "holomorphic continuation amplitude".into(),
        });
    }

    let n = field.dim();
    let u = ladder_powers(zm, n);
    let v = ladder_powers(zp, n);
    let a = field.elements();
    let mut total = C64::new(0.0, 0.0);
    for s in 0..(2 * n - 1) {
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        let mut diag = C64::new(0.0, 0.0);
        for i in lo..=hi {
            diag += u[i] * a[(i, s - i)] * v[s - i];
        }
        total += diag;
    }
    let pref = field.mode_prefactor();
    let value = (-cross).exp() * total * pref;

    let mut bound = 0.0;
    if matches!(field.mode, FieldMode::Density) {
        let tail_mass = field.declared_tail();
        if tail_mass > 0.0 {
            let tau_m = poisson_tail(s_m, n);
            let tau_p = poisson_tail(s_p, n);
            let g_m = ladder_mass(a, zm, n);
            let g_p = ladder_mass(a, zp, n);
            let inner = tail_mass.sqrt() * ((g_m * tau_p).sqrt() + (g_p * tau_m).sqrt())
                + tail_mass * (tau_m * tau_p).sqrt();
            if inner > 0.0 {
                bound = pref * (envelope + inner.ln()).exp();
            }
        }
    }
    Ok((value, bound))
}

/// min(1, e^{−|z|²} (Σₙ |z|ⁿ √ρₙₙ / √n!)²) — an upper envelope for the
/// quadratic form of ρ's block along the z-ladder, by Schur positivity
/// |ρ_nm| ≤ √(ρ_nn ρ_mm). Accumulated relative to the running maximum term
/// in log space so extreme |z| cannot overflow the partial sums.
fn ladder_mass(rho: &DMatrix<C64>, z: C64, n: usize) -> f64 {
    let s = z.norm_sqr();
    if s == 0.0 {
        return 1.0;
    }
    let ln_r = 0.5 * s.ln();
    let mut peak = f64::NEG_INFINITY;
    let mut sum = 0.0f64; // Σ exp(ln termₖ − peak), rescaled as peak rises
    for k in 0..n {
        let d = rho[(k, k)].re.max(0.0);
        if d == 0.0 {
            continue;
        }
        let lt = k as f64 * ln_r - 0.5 * ln_factorial(k) + 0.5 * d.ln();
        if lt > peak {
            sum = sum * (peak - lt).exp() + 1.0;
            peak = lt;
        } else {
            sum += (lt - peak).exp();
        }
    }
    if sum == 0.0 {
        return 0.0;
    }
    (-s + 2.0 * (peak + sum.ln())).exp().min(1.0)
}

fn ladder_powers(z: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n);
    let mut c = C64::new(1.0, 0.0);
    out.push(c);
    for k in 1..n {
        c *= z / (k as f64).sqrt();
        out.push(c);
    }
    out
}

/// The complex phase point at which the continued transform reproduces the
/// off-diagonal element ⟨pt1|·|pt2⟩: its continuation variables satisfy
/// z₋ = z̄₁ and z₊ = z₂. Coinciding points return the real point itself.
pub fn complexified_midpoint(
    frame: &SqueezedFrame,
    pt1: CPhasePoint,
    pt2: CPhasePoint,
) -> Result<CPhasePoint> {
    for pt in [&pt1, &pt2] {
        if !pt.is_real(1e-9) {
            return Err(NumericsError::InvalidArgument(
                "midpoint construction expects real phase points".into(),
            ));
        }
    }
    let lam = frame.lambda();
    let (x1t, p1t) = frame.rotate_real(pt1.x.re, pt1.p.re);
    let (x2t, p2t) = frame.rotate_real(pt2.x.re, pt2.p.re);
    let xt = C64::new(0.5 * (x1t + x2t), -0.5 * lam * lam * (p1t - p2t));
    let pt = C64::new(0.5 * (p1t + p2t), 0.5 * (x1t - x2t) / (lam * lam));
    let (x, p) = crate::fock::rotate_quadratures(xt, pt, -frame.theta());
    Ok(CPhasePoint::new(x, p))
}

/// Overlap of two squeezed coherent states of the same frame:
/// exp[−½(|z₁|² + |z₂|²) + z̄₁z₂].
pub fn squeezed_overlap(
    frame: &SqueezedFrame,
    pt1: CPhasePoint,
    pt2: CPhasePoint,
) -> Result<C64> {
    for pt in [&pt1, &pt2] {
        if !pt.is_real(1e-9) {
            return Err(NumericsError::InvalidArgument(
                "overlap expects real phase points".into(),
            ));
        }
    }
    let z1 = frame.z(pt1.x.re, pt1.p.re);
    let z2 = frame.z(pt2.x.re, pt2.p.re);
    Ok((-0.5 * (z1.norm_sqr() + z2.norm_sqr()) + z1.conj() * z2).exp())
}

/// Off-diagonal matrix element ⟨pt1|Â|pt2⟩ recovered from the continued
/// transform: overlap × A^c(midpoint), with the density-mode 2π restored so
/// both modes return the bare matrix element.
pub fn offdiag_element(field: &HusimiField, pt1: CPhasePoint, pt2: CPhasePoint) -> Result<C64> {
    let mid = complexified_midpoint(&field.frame, pt1, pt2)?;
    let overlap = squeezed_overlap(&field.frame, pt1, pt2)?;
    let continued = husimi_continued(field, mid)?;
    let undo = match field.mode {
        FieldMode::Density => 2.0 * std::f64::consts::PI,
        FieldMode::Operator => 1.0,
    };
    Ok(overlap * continued * undo)
}

/// Brute-force ⟨pt1|Â|pt2⟩ by the double Fock sum; the oracle for
/// [`offdiag_element`]. Mode-independent (no prefactor).
pub fn offdiag_direct(field: &HusimiField, pt1: CPhasePoint, pt2: CPhasePoint) -> Result<C64> {
    for pt in [&pt1, &pt2] {
        if !pt.is_real(1e-9) {
            return Err(NumericsError::InvalidArgument(
                "offdiag_direct expects real phase points".into(),
            ));
        }
    }
    let n = field.dim();
    let c1 = coherent_amplitudes(&field.frame, pt1, n)?;
    let c2 = coherent_amplitudes(&field.frame, pt2, n)?;
    let a = field.elements();
    let mut total = C64::new(0.0, 0.0);
    for s in 0..(2 * n - 1) {
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        let mut diag = C64::new(0.0, 0.0);
        for i in lo..=hi {
            diag += c1[i].conj() * a[(i, s - i)] * c2[s - i];
        }
        total += diag;
    }
    // Same block/tail Cauchy–Schwarz signal as the diagonal evaluation,
    // with the two coherent tail masses entering independently.
    let tail_mass = field.declared_tail();
    if tail_mass > 0.0 {
        let t1 = poisson_tail(field.frame.z(pt1.x.re, pt1.p.re).norm_sqr(), n);
        let t2 = poisson_tail(field.frame.z(pt2.x.re, pt2.p.re).norm_sqr(), n);
        let bound = tail_mass.sqrt() * (t1.sqrt() + t2.sqrt()) + tail_mass * (t1 * t2).sqrt();
        if bound > field.tolerance {
            return Err(NumericsError::Truncation {
                bound,
                tol: field.tolerance,
            });
        }
    }
    Ok(total)
}
