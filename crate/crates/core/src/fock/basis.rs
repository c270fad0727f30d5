//! Change of basis between the standard number basis (λ = 1, θ = 0) and the
//! number basis of a squeezed frame.
//!
//! Frame ladder operators relate to the standard ones by
//! a_f = cosh η e^{−iθ} a − sinh η e^{iθ} a†  (η = ln λ), so the frame number
//! states are squeezed states in the standard basis.
//!
//! Numerics: repeatedly applying a_f† is exact algebraically but violently
//! unstable in floating point — parasitic roundoff components grow by a
//! factor ~cosh η · √(dim/k) per level, which overflows near level ~200.
//! Instead, note V[j,k] = ⟨j|k⟩_f factorizes as e^{ijθ} W[j,k] with W real
//! and vanishing unless j ≡ k (mod 2), and each row of W satisfies the
//! stride-2 three-term recurrence obtained from ⟨j|a†a = j⟨j| written in
//! frame ladders:
//!   cs√((k+1)(k+2)) W[j,k+2] = [j − (c²+s²)k − s²] W[j,k] − cs√(k(k−1)) W[j,k−2]
//! (c = cosh η, s = sinh η). Its two solutions behave like (∓tanh η)^(k/2)
//! and (∓coth η)^(k/2) at large k; the physical row is the decaying one, so
//! backward recurrence from above the turning point is stable, and anchoring
//! at k = j mod 2 uses the closed frame-vacuum column (two-term, stable) and
//! W[j,1] = √j W[j−1,0]/cosh η.

use nalgebra::DMatrix;

use crate::error::{NumericsError, Result};
use crate::fock::{DensityOperator, SqueezedFrame, C64};

/// Standard-basis coefficients of the first `cols` frame number states:
/// out[(m, n)] = ⟨m|n⟩_f, accurate to near f64 precision.
pub fn frame_basis_columns(frame: &SqueezedFrame, rows: usize, cols: usize) -> DMatrix<C64> {
    assert!(rows > 0 && cols > 0, "basis block must be nonempty");
    let theta = frame.theta();
    let w = frame_basis_real(frame, rows, cols);
    let mut out = DMatrix::<C64>::zeros(rows, cols);
    for j in 0..rows {
        let ph = C64::new(0.0, theta * j as f64).exp();
        for k in 0..cols {
            if w[(j, k)] != 0.0 {
                out[(j, k)] = ph * w[(j, k)];
            }
        }
    }
    out
}

/// The real factor W of the basis block (V[j,k] = e^{ijθ} W[j,k]).
fn frame_basis_real(frame: &SqueezedFrame, rows: usize, cols: usize) -> DMatrix<f64> {
    let eta = frame.eta();
    let (ch, sh, th) = (eta.cosh(), eta.sinh(), eta.tanh());
    let mut w = DMatrix::<f64>::zeros(rows, cols);
    if sh == 0.0 {
        // λ = 1: a pure quadrature rotation, diagonal in the number basis.
        for d in 0..rows.min(cols) {
            w[(d, d)] = 1.0;
        }
        return w;
    }

    // Frame vacuum column (one spare row for the k = 1 anchors).
    let jtop = rows + 1;
    let mut col0 = vec![0.0f64; jtop + 1];
    col0[0] = 1.0 / ch.sqrt();
    let mut j = 0;
    while j + 2 <= jtop {
        col0[j + 2] = th * ((j + 1) as f64 / (j + 2) as f64).sqrt() * col0[j];
        j += 2;
    }
    for j in (0..rows).step_by(2) {
        w[(j, 0)] = col0[j];
    }
    if cols > 1 {
        for j in (1..rows).step_by(2) {
            w[(j, 1)] = (j as f64).sqrt() * col0[j - 1] / ch;
        }
    }
    if cols <= 2 {
        return w;
    }

    // Each row is bump-shaped in k with turning points k ≈ (j − s²)e^(∓2η):
    // above the upper one the physical solution decays (backward recurrence
    // stable), below the lower one it decays toward the anchor (forward
    // recurrence stable), and the band between is neutral for both. So run
    // forward from the exact bottom anchor up to the upper turning point and
    // splice a backward (Miller) pass onto it over a small window there.
    // Parasitic contamination of the backward pass shrinks by tanh²η per
    // stride; the start margin targets tanh η^(2·margin) ≲ 1e-17.
    let margin = ((20.0 / th.abs().ln().abs()).ceil() as usize).clamp(4, 20000) + 16;
    let cosh2 = ch * ch + sh * sh;
    let cs = ch * sh;
    let s2 = sh * sh;
    let step_down = |jf: f64, k: usize, cur: f64, hi: f64| {
        ((jf - cosh2 * k as f64 - s2) * cur - cs * (((k + 1) * (k + 2)) as f64).sqrt() * hi)
            / (cs * ((k * (k - 1)) as f64).sqrt())
    };
    let step_up = |jf: f64, k: usize, cur: f64, lo: f64| {
        ((jf - cosh2 * k as f64 - s2) * cur
            - if k >= 2 {
                cs * ((k * (k - 1)) as f64).sqrt() * lo
            } else {
                0.0
            })
            / (cs * (((k + 1) * (k + 2)) as f64).sqrt())
    };
    for j in 0..rows {
        let p = j & 1;
        let kmax = if (cols - 1) % 2 == p { cols - 1 } else { cols - 2 };
        if kmax < 2 {
            continue;
        }
        let jf = j as f64;
        let k_up = (jf - s2) * (2.0 * eta.abs()).exp();
        let fwd_end = if k_up <= p as f64 {
            p
        } else {
            let cap = (k_up.ceil() as usize).min(kmax);
            if cap % 2 == p { cap } else { cap - 1 }
        }
        .max(p);

        // Forward pass from the anchor (the k = p step needs no lower
        // neighbour: its coefficient √(p(p−1)) vanishes for p ∈ {0,1}).
        let mut fwd = vec![0.0f64; fwd_end + 1];
        fwd[p] = w[(j, p)];
        let mut k = p;
        while k + 2 <= fwd_end {
            fwd[k + 2] = step_up(jf, k, fwd[k], if k >= 2 { fwd[k - 2] } else { 0.0 });
            k += 2;
        }
        let mut k = p + 2;
        while k <= fwd_end {
            w[(j, k)] = fwd[k];
            k += 2;
        }
        if fwd_end >= kmax {
            continue;
        }

        // Backward pass down to a splice window ending at fwd_end.
        let window_lo = fwd_end.saturating_sub(8).max(p);
        // Seed of 1 keeps the squared window sums out of the denormal range
        // (values only grow on the way down; the 1e250 rescale bounds them).
        let ktop = kmax + 2 * margin;
        let mut raw = vec![0.0f64; cols];
        let mut hi = 0.0f64;
        let mut cur = 1.0f64;
        let mut k = ktop;
        loop {
            let down = step_down(jf, k, cur, hi);
            hi = cur;
            cur = down;
            k -= 2;
            if k < cols {
                raw[k] = cur;
            }
            if k == window_lo {
                break;
            }
            if cur.abs() > 1e250 {
                hi *= 1e-250;
                cur *= 1e-250;
                for r in raw.iter_mut() {
                    *r *= 1e-250;
                }
            }
        }
        // Least-squares match of the two passes over the window.
        let (mut num, mut den) = (0.0f64, 0.0f64);
        let mut k = window_lo;
        while k <= fwd_end {
            num += fwd[k] * raw[k];
            den += raw[k] * raw[k];
            k += 2;
        }
        let scale = if den > 0.0 { num / den } else { 0.0 };
        let mut k = fwd_end + 2;
        while k <= kmax {
            w[(j, k)] = raw[k] * scale;
            k += 2;
        }
    }
    w
}

/// How many frame-basis states a transform may use before giving up.
const MAX_FRAME_DIM: usize = 4096;

/// Initial guess for the frame dimension needed to keep the transform loss
/// below tol when the state occupies standard levels up to `support`.
fn frame_dim_estimate(frame: &SqueezedFrame, support: usize, tol: f64) -> usize {
    let t = frame.eta().tanh().abs();
    let squeeze_span = if t < 1e-12 {
        0
    } else {
        (tol.ln() / t.ln()).ceil() as usize
    };
    (support + squeeze_span + 32).min(MAX_FRAME_DIM)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "tolerance must lie in (0, 1), got {tol}"
        )));
    }
    Ok(())
}

/// Express a pure standard-basis state in the frame basis as a rank-one
/// density matrix. `base_tail` is probability already outside `psi_std`.
fn pure_std_to_frame(
    frame: &SqueezedFrame,
    psi_std: &[C64],
    base_tail: f64,
    tol: f64,
) -> Result<DensityOperator> {
    check_tol(tol)?;
    let m = psi_std.len();
    let norm2: f64 = psi_std.iter().map(|c| c.norm_sqr()).sum();
    let mut k_dim = frame_dim_estimate(frame, m, tol);
    loop {
        let v = frame_basis_columns(frame, m, k_dim);
        // d = V† ψ: frame-basis coefficients.
        let mut d = vec![C64::new(0.0, 0.0); k_dim];
        for (n, dn) in d.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, psi) in psi_std.iter().enumerate() {
                acc += v[(k, n)].conj() * *psi;
            }
            *dn = acc;
        }
        let captured: f64 = d.iter().map(|c| c.norm_sqr()).sum();
        let loss = norm2 - captured;
        if loss < 0.5 * tol || k_dim >= MAX_FRAME_DIM {
            if loss >= 0.5 * tol {
                return Err(NumericsError::Truncation {
                    bound: loss,
                    tol,
                });
            }
            let dim = trimmed_len(&d, tol);
            let mut rho = DMatrix::<C64>::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] = d[i] * d[j].conj();
                }
            }
            let kept: f64 = d[..dim].iter().map(|c| c.norm_sqr()).sum();
            let tail = (1.0 - kept).max(0.0).max(base_tail);
            return Ok(DensityOperator::new_unchecked(rho, tail));
        }
        k_dim = (k_dim * 2).min(MAX_FRAME_DIM);
    }
}

/// Drop trailing coefficients that together carry less than tol/4 weight.
fn trimmed_len(d: &[C64], tol: f64) -> usize {
    let mut acc = 0.0;
    let mut dim = d.len();
    for c in d.iter().rev() {
        acc += c.norm_sqr();
        if acc > 0.25 * tol {
            break;
        }
        dim -= 1;
    }
    dim.max(1)
}

/// Standard Fock state |n⟩⟨n| expressed in the frame's number basis. The
/// truncation is chosen so the lost probability stays below tol and is
/// declared on the result.
pub fn fock_state_in_frame(frame: &SqueezedFrame, n: usize, tol: f64) -> Result<DensityOperator> {
    let mut psi = vec![C64::new(0.0, 0.0); n + 1];
    psi[n] = C64::new(1.0, 0.0);
    pure_std_to_frame(frame, &psi, 0.0, tol)
}

/// Reference-frame coherent state |x,p⟩ (λ = 1, θ = 0) in the frame basis.
pub fn coherent_state_in_frame(
    frame: &SqueezedFrame,
    x: f64,
    p: f64,
    tol: f64,
) -> Result<DensityOperator> {
    check_tol(tol)?;
    if !(x.is_finite() && p.is_finite()) {
        return Err(NumericsError::InvalidArgument(format!(
            "coherent state needs finite (x, p), got ({x}, {p})"
        )));
    }
    // Poisson support: mean + generous deviation, then verified directly.
    let mean = 0.5 * (x * x + p * p);
    let mut m = (mean + 12.0 * mean.sqrt().max(1.0) + 24.0).ceil() as usize;
    let reference = SqueezedFrame::reference();
    loop {
        let psi = crate::fock::coherent_amplitudes(
            &reference,
            crate::fock::CPhasePoint::real(x, p),
            m,
        )?;
        let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if 1.0 - norm2 < 0.25 * tol {
            return pure_std_to_frame(frame, &psi, 1.0 - norm2, tol);
        }
        if m >= MAX_FRAME_DIM {
            return Err(NumericsError::Truncation {
                bound: 1.0 - norm2,
                tol,
            });
        }
        m = (m * 2).min(MAX_FRAME_DIM);
    }
}

/// Thermal state of mean occupation n̄ in the standard basis, truncated where
/// the lost probability drops below tol (declared on the result).
pub fn thermal_density(mean: f64, tol: f64) -> Result<DensityOperator> {
    check_tol(tol)?;
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "thermal mean occupation must be nonnegative, got {mean}"
        )));
    }
    let ratio = mean / (1.0 + mean);
    let dim = if ratio < 1e-300 {
        1
    } else {
        ((tol.ln() / ratio.ln()).ceil() as usize + 2).min(MAX_FRAME_DIM)
    };
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    let mut pk = 1.0 / (1.0 + mean);
    let mut total = 0.0;
    for k in 0..dim {
        rho[(k, k)] = C64::new(pk, 0.0);
        total += pk;
        pk *= ratio;
    }
    let tail = (1.0 - total).max(0.0);
    if tail >= tol {
        return Err(NumericsError::Truncation { bound: tail, tol });
    }
    Ok(DensityOperator::new_unchecked(rho, tail))
}

/// Thermal state re-expressed in the frame's number basis.
pub fn thermal_state_in_frame(
    frame: &SqueezedFrame,
    mean: f64,
    tol: f64,
) -> Result<DensityOperator> {
    let std = thermal_density(mean, 0.25 * tol)?;
    state_in_frame(frame, &std, tol)
}

/// Re-express a standard-basis density matrix in the frame's number basis:
/// ρ_f = V† ρ V with V the frame-basis block. The transform loss (trace mass
/// the frame truncation cannot capture) must stay below tol; it is added to
/// the declared tail.
pub fn state_in_frame(
    frame: &SqueezedFrame,
    rho_std: &DensityOperator,
    tol: f64,
) -> Result<DensityOperator> {
    check_tol(tol)?;
    let m = rho_std.dim();
    let trace_std: f64 = (0..m).map(|i| rho_std.elements()[(i, i)].re).sum();
    let mut k_dim = frame_dim_estimate(frame, m, tol);
    loop {
        let v = frame_basis_columns(frame, m, k_dim);
        let half = rho_std.elements() * &v; // M×K
        let rho_f = v.adjoint() * half; // K×K
        let trace_f: f64 = (0..k_dim).map(|i| rho_f[(i, i)].re).sum();
        let loss = trace_std - trace_f;
        if loss < tol || k_dim >= MAX_FRAME_DIM {
            if loss >= tol {
                return Err(NumericsError::Truncation { bound: loss, tol });
            }
            // Symmetrize away product roundoff; V†ρV inherits positivity.
            let sym = (&rho_f + rho_f.adjoint()) * C64::new(0.5, 0.0);
            let tail = (1.0 - trace_f).max(0.0);
            return Ok(DensityOperator::new_unchecked(sym, tail));
        }
        k_dim = (k_dim * 2).min(MAX_FRAME_DIM);
    }
}

/// Inverse transform: a frame-basis density matrix back to the standard
/// basis, ρ_std = V ρ_f V†. Loss declared the same way.
pub fn state_from_frame(
    frame: &SqueezedFrame,
    rho_f: &DensityOperator,
    tol: f64,
) -> Result<DensityOperator> {
    check_tol(tol)?;
    let k_dim = rho_f.dim();
    let trace_f: f64 = (0..k_dim).map(|i| rho_f.elements()[(i, i)].re).sum();
    let mut m = frame_dim_estimate(frame, k_dim, tol);
    loop {
        let v = frame_basis_columns(frame, m, k_dim);
        let half = rho_f.elements() * v.adjoint(); // K×M
        let rho_std = &v * half; // M×M
        let trace_s: f64 = (0..m).map(|i| rho_std[(i, i)].re).sum();
        let loss = trace_f - trace_s;
        if loss < tol || m >= MAX_FRAME_DIM {
            if loss >= tol {
                return Err(NumericsError::Truncation { bound: loss, tol });
            }
            let sym = (&rho_std + rho_std.adjoint()) * C64::new(0.5, 0.0);
            let tail = (1.0 - trace_s).max(0.0);
            return Ok(DensityOperator::new_unchecked(sym, tail));
        }
        m = (m * 2).min(MAX_FRAME_DIM);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_amplitudes, position_overlap, CPhasePoint};
    use crate::util::hermite_functions;
    use approx::assert_relative_eq;

    #[test]
    fn reference_frame_is_identity() {
        let f = SqueezedFrame::reference();
        let v = frame_basis_columns(&f, 6, 6);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn unit_lambda_rotation_gives_diagonal_phases() {
        let theta = 0.7;
        let f = SqueezedFrame::new(1.0, theta).unwrap();
        let v = frame_basis_columns(&f, 6, 6);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j {
                    C64::new(0.0, theta * i as f64).exp()
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((v[(i, j)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn columns_are_orthonormal() {
        let f = SqueezedFrame::new(1.4, 0.5).unwrap();
        let v = frame_basis_columns(&f, 120, 12);
        let g = v.adjoint() * &v;
        for i in 0..12 {
            for j in 0..12 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (g[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-12,
                    "gram defect at ({i},{j}): {}",
                    g[(i, j)]
                );
            }
        }
    }

    #[test]
    fn vacuum_column_is_annihilated() {
        let f = SqueezedFrame::new(0.6, 1.1).unwrap();
        let m = 220;
        let v = frame_basis_columns(&f, m, 2);
        let eta = f.eta();
        let phase = C64::new(0.0, f.theta()).exp();
        let ca = eta.cosh() * phase.conj();
        let cd = eta.sinh() * phase;
        // (cosh η e^{−iθ} a − sinh η e^{iθ} a†) v0 component at row k:
        // ca √(k+1) v[k+1] − cd √k v[k−1].
        let mut worst: f64 = 0.0;
        for k in 0..m - 1 {
            let down = ca * ((k + 1) as f64).sqrt() * v[(k + 1, 0)];
            let up = if k > 0 {
                cd * (k as f64).sqrt() * v[(k - 1, 0)]
            } else {
                C64::new(0.0, 0.0)
            };
            worst = worst.max((down - up).norm());
        }
        assert!(worst < 1e-13, "annihilation residual {worst}");
    }

    #[test]
    fn lowering_returns_previous_column() {
        let f = SqueezedFrame::new(1.7, 2.4).unwrap();
        let m = 80;
        let cols = 6;
        let v = frame_basis_columns(&f, m, cols);
        let eta = f.eta();
        let phase = C64::new(0.0, f.theta()).exp();
        let ca = eta.cosh() * phase.conj();
        let cd = eta.sinh() * phase;
        for n in 1..cols {
            // a_f v_n should equal √n v_{n−1} on rows clear of the boundary.
            for k in 0..m - 1 {
                let lowered = ca * ((k + 1) as f64).sqrt() * v[(k + 1, n)]
                    - if k > 0 {
                        cd * (k as f64).sqrt() * v[(k - 1, n)]
                    } else {
                        C64::new(0.0, 0.0)
                    };
                let expect = (n as f64).sqrt() * v[(k, n - 1)];
                assert!(
                    (lowered - expect).norm() < 1e-12,
                    "ladder mismatch at n={n}, k={k}"
                );
            }
        }
    }

    #[test]
    fn position_overlap_matches_basis_expansion() {
        // Expand |x,p⟩_f over frame number states, convert to the standard
        // basis, and evaluate in the x_φ representation where
        // ⟨x′|m⟩ = e^{−imφ} ψ_m(x′). Must agree with the closed form.
        for &(lam, th) in &[(1.4, 0.5), (0.7, 2.0), (1.0, 0.0)] {
            let f = SqueezedFrame::new(lam, th).unwrap();
            let pt = CPhasePoint::real(0.7, -0.3);
            let kc = 48;
            let mr = 140;
            let c = coherent_amplitudes(&f, pt, kc).unwrap();
            let v = frame_basis_columns(&f, mr, kc);
            let mut psi_std = vec![C64::new(0.0, 0.0); mr];
            for m in 0..mr {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..kc {
                    acc += v[(m, n)] * c[n];
                }
                psi_std[m] = acc;
            }
            for &phi in &[0.0, std::f64::consts::FRAC_PI_3, 2.2] {
                for &xp in &[-1.3, 0.0, 0.8, 2.1] {
                    let psi = hermite_functions(xp, mr);
                    let mut wave = C64::new(0.0, 0.0);
                    for m in 0..mr {
                        wave += psi_std[m] * C64::new(0.0, -(m as f64) * phi).exp() * psi[m];
                    }
                    let closed = position_overlap(&f, pt, phi, xp).unwrap();
                    assert!(
                        (wave - closed).norm() < 1e-10,
                        "λ={lam} θ={th} φ={phi} x′={xp}: expansion {wave} vs closed {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn fock_state_round_trips() {
        let f = SqueezedFrame::new(1.4, 0.5).unwrap();
        let tol = 1e-10;
        let rho_f = fock_state_in_frame(&f, 3, tol).unwrap();
        assert!(rho_f.declared_tail() < tol);
        let back = state_from_frame(&f, &rho_f, 10.0 * tol).unwrap();
        // Should be |3⟩⟨3| in the standard basis.
        for i in 0..back.dim().min(8) {
            for j in 0..back.dim().min(8) {
                let expect = if i == 3 && j == 3 { 1.0 } else { 0.0 };
                assert!(
                    (back.elements()[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-8,
                    "entry ({i},{j}) = {}",
                    back.elements()[(i, j)]
                );
            }
        }
    }

    #[test]
    fn strong_squeezing_needs_many_levels_but_converges() {
        let f = SqueezedFrame::new(0.25, 0.0).unwrap();
        let rho_f = fock_state_in_frame(&f, 6, 1e-9).unwrap();
        assert!(rho_f.declared_tail() < 1e-9);
        assert!(rho_f.dim() > 100, "dim {}", rho_f.dim());
        let trace: f64 = (0..rho_f.dim()).map(|i| rho_f.elements()[(i, i)].re).sum();
        assert_relative_eq!(trace, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn coherent_state_in_own_frame_is_displaced_vacuum_profile() {
        // In the reference frame the transform is trivial: Poisson weights.
        let f = SqueezedFrame::reference();
        let rho = coherent_state_in_frame(&f, std::f64::consts::SQRT_2, 0.0, 1e-12).unwrap();
        let e1 = (-1.0f64).exp();
        for n in 0..6 {
            let poisson = e1 / (0.5 * crate::util::ln_factorial(n)).exp().powi(2);
            assert_relative_eq!(rho.elements()[(n, n)].re, poisson, max_relative = 1e-9);
        }
    }

    #[test]
    fn thermal_state_trace_and_tail() {
        let rho = thermal_density(1.0, 1e-9).unwrap();
        let trace: f64 = (0..rho.dim()).map(|i| rho.elements()[(i, i)].re).sum();
        assert!((trace + rho.declared_tail() - 1.0).abs() < 1e-12);
        assert_relative_eq!(rho.elements()[(0, 0)].re, 0.5, max_relative = 1e-12);

        let f = SqueezedFrame::new(0.5, 0.8).unwrap();
        let rho_f = thermal_state_in_frame(&f, 1.0, 1e-8).unwrap();
        let trace_f: f64 = (0..rho_f.dim()).map(|i| rho_f.elements()[(i, i)].re).sum();
        assert!((trace_f + rho_f.declared_tail() - 1.0).abs() < 1e-7);
        let report = crate::fock::validate_density(&rho_f, 1e-7);
        assert!(report.passes, "{report:?}");
    }

    #[test]
    fn vacuum_mean_zero_thermal() {
        let rho = thermal_density(0.0, 1e-9).unwrap();
        assert_eq!(rho.dim(), 1);
        assert!((rho.elements()[(0, 0)].re - 1.0).abs() < 1e-15);
    }
}
