//! Closed-form oracles written independently of the library code paths.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Truncated Glauber amplitudes `e^{-|z|²/2} zⁿ/√n!`, n = 0..=cutoff.
pub fn glauber_amps(z: Complex64, cutoff: usize) -> DVector<Complex64> {
    DVector::from_fn(cutoff + 1, |n, _| {
        if z.norm() == 0.0 {
            return if n == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
        }
        let log_mag = -0.5 * z.norm_sqr() + n as f64 * z.norm().ln() - 0.5 * ln_factorial(n);
        Complex64::from_polar(log_mag.exp(), n as f64 * z.arg())
    })
}

/// Spin coherent amplitudes `(1+|ζ|²)^{-j} ζ^{k} √C(2j,k)` on `m = −j + k`.
pub fn spin_cs_amps(two_j: u32, zeta: Complex64) -> DVector<Complex64> {
    let n = two_j as usize;
    let norm = (1.0 + zeta.norm_sqr()).powf(-0.5 * n as f64);
    DVector::from_fn(n + 1, |k, _| {
        let binom = (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp();
        zeta.powi(k as i32) * binom.sqrt() * norm
    })
}

/// `(J₀, J₊, J₋)` for spin `two_j / 2`, basis `m` ascending.
pub fn spin_matrices(two_j: u32) -> [DMatrix<Complex64>; 3] {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut zero = DMatrix::zeros(d, d);
    let mut plus = DMatrix::zeros(d, d);
    for k in 0..d {
        let m = -j + k as f64;
        zero[(k, k)] = c(m, 0.0);
        if k + 1 < d {
            plus[(k + 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let minus = plus.adjoint();
    [zero, plus, minus]
}

pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Von Neumann entropy in bits of the reduced state for a `d_b × d_c`
/// bipartite amplitude vector (row-major, left factor slowest).
pub fn entropy_bits_svd(amps: &DVector<Complex64>, d_b: usize, d_c: usize) -> f64 {
    let m = DMatrix::from_fn(d_b, d_c, |i, k| amps[i * d_c + k]);
    let sv = m.svd(false, false).singular_values;
    sv.iter()
        .map(|s| s * s)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `|⟨u|v⟩|`.
pub fn overlap_abs(u: &DVector<Complex64>, v: &DVector<Complex64>) -> f64 {
    u.dotc(v).norm()
}

/// Maximal CHSH value of a pure two-qubit state, `2√(1 + C²)` with the
/// concurrence `C = 2|ad − bc|`.
pub fn pure_two_qubit_chsh(amps: &DVector<Complex64>) -> f64 {
    let conc = 2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm();
    2.0 * (1.0 + conc * conc).sqrt()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}
