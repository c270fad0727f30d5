//! Quadrature rules used by the integral transforms: Gauss–Hermite product
//! rules for Gaussian-weighted integrands and uniform (trapezoid) rules for
//! entire integrands with Gaussian decay, where uniform sampling converges
//! superexponentially.

use crate::error::{NumericsError, Result};

/// Scheme selector for [`QuadratureSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Nodes/weights of ∫e^{−s²}f(s)ds; half-widths ignored.
    GaussHermite,
    /// Uniform rule over [−L, L] in units of the axis Gaussian width.
    Trapezoid,
}

/// Tensor-product quadrature description. Node counts and half-widths are
/// per axis; when an op needs more axes than entries, the last entry repeats.
/// Half-widths are measured in units of each axis's natural Gaussian width.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub nodes: Vec<usize>,
    pub half_widths: Vec<f64>,
    /// Node-count multiplier used when an op verifies convergence by
    /// refinement: the refined and base results must agree to the op's
    /// tolerance.
    pub refine: usize,
    /// If set, ops that support it re-evaluate on the refined rule and
    /// signal non-convergence when the two results disagree.
    pub verify: bool,
}

impl QuadratureSpec {
    pub fn gauss_hermite(n: usize) -> Self {
        Self {
            scheme: QuadratureScheme::GaussHermite,
            nodes: vec![n],
            half_widths: vec![8.0],
            refine: 2,
            verify: false,
        }
    }

    pub fn trapezoid(n: usize, half_width: f64) -> Self {
        Self {
            scheme: QuadratureScheme::Trapezoid,
            nodes: vec![n],
            half_widths: vec![half_width],
            refine: 2,
            verify: false,
        }
    }

    pub fn with_verification(mut self) -> Self {
        self.verify = true;
        self
    }

    pub fn nodes_for(&self, axis: usize) -> usize {
        *self
            .nodes
            .get(axis)
            .or_else(|| self.nodes.last())
            .unwrap_or(&32)
    }

    pub fn half_width_for(&self, axis: usize) -> f64 {
        *self
            .half_widths
            .get(axis)
            .or_else(|| self.half_widths.last())
            .unwrap_or(&8.0)
    }

    /// The same spec with every node count multiplied by `refine`.
    pub fn refined(&self) -> Self {
        let mut out = self.clone();
        for n in &mut out.nodes {
            *n = (*n * self.refine.max(2)).max(*n + 1);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() || self.nodes.iter().any(|&n| n == 0) {
            return Err(NumericsError::InvalidArgument(
                "quadrature needs at least one node per axis".into(),
            ));
        }
        if self
            .half_widths
            .iter()
            .any(|&w| !(w.is_finite() && w > 0.0))
        {
            return Err(NumericsError::InvalidArgument(
                "quadrature half-widths must be positive".into(),
            ));
        }
        if self.refine < 2 {
            return Err(NumericsError::InvalidArgument(
                "refinement factor must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::gauss_hermite(48)
    }
}

/// One-dimensional Gauss–Hermite rule: Σ w_i f(s_i) ≈ ∫ e^{−s²} f(s) ds.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// w_i e^{s_i²}: weights for integrating a raw function that carries its
    /// own Gaussian decay, Σ ŵ_i h(s_i) ≈ ∫ h(s) ds.
    pub effective_weights: Vec<f64>,
}

/// Orthonormal Hermite polynomials p_{n−1}, p_n at x (weight e^{−x²}),
/// evaluated by the three-term recurrence with a running rescale so the
/// e^{x²/2}-sized envelope never overflows. Returns the two rescaled values
/// and the natural log of the factor divided out.
fn scaled_hermite_pair(x: f64, n: usize) -> (f64, f64, f64) {
    const CAP: f64 = 1e140;
    let mut ln_scale = 0.0;
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs().max(prev.abs()) > CAP {
            prev /= CAP;
            cur /= CAP;
            ln_scale += CAP.ln();
        }
    }
    (prev, cur, ln_scale)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL,
/// eigenvalues only (no vectors). `d` is the diagonal, `e[k]` couples rows
/// k and k+1. Returns the spectrum in ascending order.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    assert_eq!(e.len() + 1, n, "off-diagonal length must be n-1");
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        'sweep: loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    continue 'sweep;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Gauss–Hermite rule: nodes from the Jacobi matrix spectrum (implicit-QL,
/// eigenvalues only), polished by Newton on the orthonormal recurrence;
/// weights from w_i = 1/(n·p_{n−1}(x_i)²) assembled in log scale. The log
/// route keeps full *relative* accuracy even for the exponentially small
/// boundary weights of large rules, which the contour-shifted inversion
/// integrals multiply by e^{+x²}-sized factors — an eigenvector-based weight
/// construction only achieves absolute accuracy and fails there.
pub fn gauss_hermite(n: usize) -> GaussHermite {
    assert!(n > 0, "rule needs at least one node");
    let nf = n as f64;
    let deriv_norm = (2.0 * nf).sqrt(); // p_n'(x) = √(2n)·p_{n−1}(x)

    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let guesses = tridiagonal_eigenvalues(vec![0.0; n], offdiag);

    // polish and weigh the non-negative half; mirror the rest
    let m = n.div_ceil(2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut effective = vec![0.0; n];
    for i in 0..m {
        let idx = n - 1 - i; // descending from the largest root
        let center = n % 2 == 1 && i == m - 1;
        let mut z = if center { 0.0 } else { guesses[idx] };
        let mut ln_pm1 = 0.0;
        for _ in 0..40 {
            let (pm1, pn, ln_scale) = scaled_hermite_pair(z, n);
            ln_pm1 = pm1.abs().ln() + ln_scale;
            if center {
                break;
            }
            let dz = pn / (deriv_norm * pm1);
            z -= dz;
            if dz.abs() <= 1e-15 * (1.0 + z.abs()) {
                let (pm1, _, ln_scale) = scaled_hermite_pair(z, n);
                ln_pm1 = pm1.abs().ln() + ln_scale;
                break;
            }
        }
        let ln_w = -(2.0 * ln_pm1 + nf.ln());
        let w = ln_w.exp();
        let e = (ln_w + z * z).exp();
        nodes[idx] = z;
        weights[idx] = w;
        effective[idx] = e;
        nodes[i] = -z;
        weights[i] = w;
        effective[i] = e;
    }
    for i in 1..n {
        assert!(
            nodes[i] > nodes[i - 1],
            "Gauss–Hermite roots out of order at n={n}"
        );
    }
    GaussHermite {
        nodes,
        weights,
        effective_weights: effective,
    }
}

/// Uniform nodes and the common trapezoid weight over [−half, half].
/// For entire integrands that decay like Gaussians inside the window this
/// converges superexponentially in n.
pub fn uniform_rule(n: usize, half: f64) -> (Vec<f64>, f64) {
    assert!(n > 1, "uniform rule needs at least two nodes");
    let h = 2.0 * half / (n - 1) as f64;
    let nodes = (0..n).map(|i| -half + h * i as f64).collect();
    (nodes, h)
}
