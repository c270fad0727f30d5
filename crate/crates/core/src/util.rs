//! Small numeric helpers shared across modules.

use std::sync::OnceLock;

const TABLE_LEN: usize = 256;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        for n in 2..TABLE_LEN {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

/// ln(n!). Exact table below 256, extended by direct summation above it.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    let table = ln_factorial_table();
    if n < TABLE_LEN {
        table[n]
    } else {
        let mut acc = table[TABLE_LEN - 1];
        for k in TABLE_LEN..=n {
            acc += (k as f64).ln();
        }
        acc
    }
}

/// √(n!) in log space so large n do not overflow prematurely.
pub(crate) fn sqrt_factorial(n: usize) -> f64 {
    (0.5 * ln_factorial(n)).exp()
}

/// n evenly spaced points including both endpoints (n = 1 gives [lo]).
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + h * i as f64).collect()
}

/// First n harmonic-oscillator eigenfunctions ψ_0..ψ_{n−1} at x, by the
/// normalized recurrence ψ_{k+1} = √(2/(k+1)) x ψ_k − √(k/(k+1)) ψ_{k−1}.
/// The Gaussian is folded in, so values stay representable for large k.
pub(crate) fn hermite_functions(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorial_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert_relative_eq!(ln_factorial(5), 120.0f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(sqrt_factorial(6), 720.0f64.sqrt(), max_relative = 1e-14);
        // Stirling sanity far beyond the table.
        let n = 300.0f64;
        let stirling =
            n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n);
        assert_relative_eq!(ln_factorial(300), stirling, max_relative = 1e-9);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-2.0, 3.0, 11);
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], -2.0);
        assert_relative_eq!(v[10], 3.0, epsilon = 1e-15);
        assert_relative_eq!(v[1] - v[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn hermite_function_values() {
        // ψ_0(0) = π^{-1/4}, ψ_2(0) = −π^{-1/4}/√2, odd ones vanish at 0.
        let psi = hermite_functions(0.0, 5);
        let p14 = std::f64::consts::PI.powf(-0.25);
        assert_relative_eq!(psi[0], p14, max_relative = 1e-15);
        assert_eq!(psi[1], 0.0);
        assert_relative_eq!(psi[2], -p14 / std::f64::consts::SQRT_2, max_relative = 1e-14);
        assert_eq!(psi[3], 0.0);

        // Orthonormality on a fine grid.
        let (lo, hi, m) = (-12.0, 12.0, 4801);
        let h = (hi - lo) / (m - 1) as f64;
        let mut g00 = 0.0;
        let mut g44 = 0.0;
        let mut g24 = 0.0;
        for i in 0..m {
            let x = lo + h * i as f64;
            let psi = hermite_functions(x, 5);
            g00 += psi[0] * psi[0];
            g44 += psi[4] * psi[4];
            g24 += psi[2] * psi[4];
        }
        assert_relative_eq!(g00 * h, 1.0, epsilon = 1e-10);
        assert_relative_eq!(g44 * h, 1.0, epsilon = 1e-10);
        assert!((g24 * h).abs() < 1e-10);
    }
}
