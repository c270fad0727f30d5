//! Normal-ordered polynomials in a ladder-operator pair (a, a†), used to
//! express quadrature observables in an arbitrary frame and to evaluate
//! coherent-state expectations in closed form.
//!
//! A polynomial is a map (j, k) → coefficient of a†^j a^k. Products are
//! re-normal-ordered with the standard contraction formula
//! (a†^j a^k)(a†^l a^m) = Σ_i i!·C(k,i)·C(l,i)·a†^{j+l−i} a^{k+m−i}.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::fock::{SqueezedFrame, C64};
use crate::util::ln_factorial;

/// A normal-ordered operator polynomial Σ c_{jk} a†^j a^k in some ladder pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalOrderedOp {
    terms: BTreeMap<(u32, u32), C64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (ln_factorial(n as usize) - ln_factorial(k as usize) - ln_factorial((n - k) as usize)).exp()
}

impl NormalOrderedOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::ladder(0, 0)
    }

    /// The monomial a†^j a^k.
    pub fn ladder(j: u32, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((j, k), C64::new(1.0, 0.0));
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        self.terms.iter().map(|(&(j, k), &c)| (j, k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest j + k over the terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(j, k)| j + k).max().unwrap_or(0)
    }

    pub fn insert(&mut self, j: u32, k: u32, coeff: C64) {
        let slot = self.terms.entry((j, k)).or_insert(C64::new(0.0, 0.0));
        *slot += coeff;
        if slot.norm() == 0.0 {
            self.terms.remove(&(j, k));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, k, c) in other.terms() {
            out.insert(j, k, c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        if s.norm() == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&jk, &c)| (jk, c * s)).collect(),
        }
    }

    /// Normal-ordered product (Wick contractions between the inner a^k and
    /// a†^l factors).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (j, k, c1) in self.terms() {
            for (l, m, c2) in other.terms() {
                let c = c1 * c2;
                for i in 0..=k.min(l) {
                    let weight =
                        (ln_factorial(i as usize)).exp() * binomial(k, i) * binomial(l, i);
                    out.insert(j + l - i, k + m - i, c * weight);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Matrix truncation in the number basis of the same ladder pair:
    /// a†^j a^k maps |m⟩ to √(m!/(m−k)!)·√((m−k+j)!/(m−k)!) |m−k+j⟩.
    pub fn matrix(&self, dim: usize) -> DMatrix<C64> {
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        for (j, k, c) in self.terms() {
            let (j, k) = (j as usize, k as usize);
            for col in k..dim {
                let row = col - k + j;
                if row >= dim {
                    continue;
                }
                let amp = (0.5 * (ln_factorial(col) - ln_factorial(col - k))
                    + 0.5 * (ln_factorial(row) - ln_factorial(col - k)))
                .exp();
                out[(row, col)] += c * amp;
            }
        }
        out
    }

    /// ⟨z|Â|z⟩ for the coherent state of the same ladder pair:
    /// each a†^j a^k contributes z̄^j z^k.
    pub fn coherent_expectation(&self, z: C64) -> C64 {
        let zc = z.conj();
        self.terms()
            .map(|(j, k, c)| c * zc.powu(j) * z.powu(k))
            .sum()
    }

    /// The physical position operator x̂ as a polynomial in the frame's
    /// ladder pair: x̂ = α a_f + ᾱ a_f†, α = λcosθ/√2 + i·sinθ/(√2 λ).
    pub fn position(frame: &SqueezedFrame) -> Self {
        let lam = frame.lambda();
        let (st, ct) = frame.theta().sin_cos();
        let s2 = std::f64::consts::SQRT_2;
        let alpha = C64::new(lam * ct / s2, st / (s2 * lam));
        let mut out = Self::zero();
        out.insert(0, 1, alpha);
        out.insert(1, 0, alpha.conj());
        out
    }

    /// The physical momentum operator p̂: p̂ = β a_f + β̄ a_f†,
    /// β = λsinθ/√2 − i·cosθ/(√2 λ).
    pub fn momentum(frame: &SqueezedFrame) -> Self {
        let lam = frame.lambda();
        let (st, ct) = frame.theta().sin_cos();
        let s2 = std::f64::consts::SQRT_2;
        let beta = C64::new(lam * st / s2, -ct / (s2 * lam));
        let mut out = Self::zero();
        out.insert(0, 1, beta);
        out.insert(1, 0, beta.conj());
        out
    }

    /// The physical number operator n̂ = (x̂² + p̂² − 1)/2 in the frame's
    /// ladder pair.
    pub fn number(frame: &SqueezedFrame) -> Self {
        let x = Self::position(frame);
        let p = Self::momentum(frame);
        let mut out = x.mul(&x).add(&p.mul(&p));
        out.insert(0, 0, C64::new(-1.0, 0.0));
        out.scale(C64::new(0.5, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::frame_basis_columns;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn wick_product_reorders_a_adagger() {
        // a a† = a†a + 1.
        let a = NormalOrderedOp::ladder(0, 1);
        let ad = NormalOrderedOp::ladder(1, 0);
        let prod = a.mul(&ad);
        let mut expect = NormalOrderedOp::ladder(1, 1);
        expect.insert(0, 0, c(1.0));
        assert_eq!(prod, expect);

        // n̂² = (a†a)(a†a) = a†²a² + a†a.
        let n = NormalOrderedOp::ladder(1, 1);
        let n2 = n.mul(&n);
        let mut expect = NormalOrderedOp::ladder(2, 2);
        expect.insert(1, 1, c(1.0));
        assert_eq!(n2, expect);

        // a²a†² = a†²a² + 4a†a + 2.
        let a2 = NormalOrderedOp::ladder(0, 2);
        let ad2 = NormalOrderedOp::ladder(2, 0);
        let prod = a2.mul(&ad2);
        let mut expect = NormalOrderedOp::ladder(2, 2);
        expect.insert(1, 1, c(4.0));
        expect.insert(0, 0, c(2.0));
        assert_eq!(prod, expect);
    }

    #[test]
    fn matrix_of_reference_position_is_tridiagonal() {
        let f = SqueezedFrame::reference();
        let x = NormalOrderedOp::position(&f).matrix(5);
        for i in 0..5usize {
            for j in 0..5usize {
                let expect = if i + 1 == j {
                    ((j as f64) / 2.0).sqrt()
                } else if j + 1 == i {
                    ((i as f64) / 2.0).sqrt()
                } else {
                    0.0
                };
                assert!(
                    (x[(i, j)] - c(expect)).norm() < 1e-14,
                    "x[{i},{j}] = {}",
                    x[(i, j)]
                );
            }
        }
    }

    #[test]
    fn number_operator_is_diagonal_in_any_frame() {
        // n̂ is the standard number operator only in the standard basis; in a
        // frame basis its matrix must transform back to diag(0..) under the
        // basis columns.
        let f = SqueezedFrame::new(1.6, 0.9).unwrap();
        let dim = 10;
        let margin = 60;
        let n_f = NormalOrderedOp::number(&f).matrix(dim + margin);
        let v = frame_basis_columns(&f, dim + 2 * margin, dim + margin);
        // Standard-basis representation: V n_f V†, compare to diag(m).
        let back = &v * &n_f * v.adjoint();
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { i as f64 } else { 0.0 };
                assert!(
                    (back[(i, j)] - c(expect)).norm() < 1e-9,
                    "n[{i},{j}] = {}",
                    back[(i, j)]
                );
            }
        }
    }

    #[test]
    fn quadrature_matrices_transform_to_standard_forms() {
        let f = SqueezedFrame::new(0.8, 2.1).unwrap();
        let dim = 8;
        let margin = 70;
        let x_f = NormalOrderedOp::position(&f).matrix(dim + margin);
        let p_f = NormalOrderedOp::momentum(&f).matrix(dim + margin);
        let v = frame_basis_columns(&f, dim + 2 * margin, dim + margin);
        let x_std = &v * &x_f * v.adjoint();
        let p_std = &v * &p_f * v.adjoint();
        let ref_frame = SqueezedFrame::reference();
        let x_expect = NormalOrderedOp::position(&ref_frame).matrix(dim + 2 * margin);
        let p_expect = NormalOrderedOp::momentum(&ref_frame).matrix(dim + 2 * margin);
        for i in 0..dim {
            for j in 0..dim {
                assert!((x_std[(i, j)] - x_expect[(i, j)]).norm() < 1e-9);
                assert!((p_std[(i, j)] - p_expect[(i, j)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn coherent_expectations() {
        let z = C64::new(0.6, -0.8);
        let n = NormalOrderedOp::ladder(1, 1);
        assert_relative_eq!(
            n.coherent_expectation(z).re,
            z.norm_sqr(),
            max_relative = 1e-14
        );
        let f = SqueezedFrame::reference();
        let x = NormalOrderedOp::position(&f);
        // ⟨x̂⟩ at reference z: √2 Re z.
        assert_relative_eq!(
            x.coherent_expectation(z).re,
            std::f64::consts::SQRT_2 * z.re,
            max_relative = 1e-14
        );
        assert!(x.coherent_expectation(z).im.abs() < 1e-15);
    }

    #[test]
    fn hermitian_polynomials_give_hermitian_matrices() {
        let f = SqueezedFrame::new(1.3, 0.4).unwrap();
        for op in [
            NormalOrderedOp::position(&f),
            NormalOrderedOp::momentum(&f),
            NormalOrderedOp::number(&f),
        ] {
            let m = op.matrix(7);
            let defect = (&m - m.adjoint()).norm();
            assert!(defect < 1e-13, "hermiticity defect {defect}");
        }
    }
}
