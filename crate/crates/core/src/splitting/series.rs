//! Formal power-series solution of the splitting functional equation
//! `f_A(μx + νy) = f_B(x) f_C(y)` (oscillator) and `f_A(x + y) = f_B(x) f_C(y)`
//! (semisimple, commuting raising arguments).
//!
//! Comparing the coefficient of `x^i y^l` on both sides gives, with
//! `k = i + l`, the equations `a_k C(k,i) μ^i ν^l = b_i c_l`. Residuals are
//! reported per equation divided by `C(k,i)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficients `c_0..c_K` of `f(x) = Σ c_k x^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoly {
    pub coeffs: Vec<Complex64>,
}

impl SeriesPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// `f0 · exp(τx)` truncated at order `order`.
    pub fn exponential(f0: Complex64, tau: Complex64, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = f0;
        for k in 0..=order {
            coeffs.push(term);
            term *= tau / (k + 1) as f64;
        }
        Self { coeffs }
    }

    /// Highest stored order.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum FunctionalEquation {
    /// `f_A(μx + νy) = f_B(x) f_C(y)`.
    Heisenberg { mu: Complex64, nu: Complex64 },
    /// `f_A(x + y) = f_B(x) f_C(y)`.
    Semisimple,
}

impl FunctionalEquation {
    pub fn weights(&self) -> (Complex64, Complex64) {
        match *self {
            FunctionalEquation::Heisenberg { mu, nu } => (mu, nu),
            FunctionalEquation::Semisimple => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Largest normalized residual among the equations of total order `k`.
pub fn order_residual(
    eq: FunctionalEquation,
    fa: &SeriesPoly,
    fb: &SeriesPoly,
    fc: &SeriesPoly,
    k: usize,
) -> f64 {
    let (mu, nu) = eq.weights();
    (0..=k)
        .map(|i| {
            let l = k - i;
            let lhs = fa.coeff(k) * mu.powi(i as i32) * nu.powi(l as i32);
            (lhs - fb.coeff(i) * fc.coeff(l) / binomial(k, i)).norm()
        })
        .fold(0.0, f64::max)
}

/// Largest residual over all orders `0..=order`.
pub fn max_residual(
    eq: FunctionalEquation,
    fa: &SeriesPoly,
    fb: &SeriesPoly,
    fc: &SeriesPoly,
    order: usize,
) -> f64 {
    (0..=order)
        .map(|k| order_residual(eq, fa, fb, fc, k))
        .fold(0.0, f64::max)
}

/// First order whose residual exceeds `tol`.
pub fn first_failing_order(
    eq: FunctionalEquation,
    fa: &SeriesPoly,
    fb: &SeriesPoly,
    fc: &SeriesPoly,
    tol: f64,
) -> Option<usize> {
    let order = fa.order().max(fb.order()).max(fc.order());
    (0..=order).find(|&k| order_residual(eq, fa, fb, fc, k) > tol)
}

/// Result of the order-by-order solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSolution {
    pub equation: FunctionalEquation,
    pub order: usize,
    /// Free parameters: `τ` and the normalizations `f_B(0)`, `f_C(0)`.
    pub tau: Complex64,
    pub f0_b: Complex64,
    pub f0_c: Complex64,
    pub a: SeriesPoly,
    pub b: SeriesPoly,
    pub c: SeriesPoly,
    /// Per order, the spread of the overdetermined mixed equations after the
    /// least-squares choice of `a_k`; zero means the order is consistent.
    pub consistency: Vec<f64>,
}

impl SeriesSolution {
    /// Largest functional-equation residual of the solved series.
    pub fn max_residual(&self) -> f64 {
        max_residual(self.equation, &self.a, &self.b, &self.c, self.order)
    }

    /// Largest deviation of the solved coefficients from the exponential
    /// family `f(0) τ^k/k!` (with `μτ`, `ντ` for the subsystems).
    pub fn exponential_deviation(&self) -> f64 {
        let (mu, nu) = self.equation.weights();
        let ea = SeriesPoly::exponential(self.f0_b * self.f0_c, self.tau, self.order);
        let eb = SeriesPoly::exponential(self.f0_b, mu * self.tau, self.order);
        let ec = SeriesPoly::exponential(self.f0_c, nu * self.tau, self.order);
        [(&self.a, &ea), (&self.b, &eb), (&self.c, &ec)]
            .iter()
            .flat_map(|(s, e)| s.coeffs.iter().zip(&e.coeffs).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

/// Solves the functional equation order by order up to `order`.
///
/// Orders 0 and 1 fix `a_0 = f_B(0) f_C(0)` and the free ratio
/// `τ = a_1/a_0`. Each higher order determines `a_k` from the mixed
/// equations (`i, l ≥ 1`) and then `b_k`, `c_k` from the pure ones.
pub fn solve_splitting_series(
    equation: FunctionalEquation,
    order: usize,
    tau: Complex64,
    f0_b: Complex64,
    f0_c: Complex64,
) -> Result<SeriesSolution> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!("series order must be at least 2, got {order}")));
    }
    if f0_b.norm() == 0.0 || f0_c.norm() == 0.0 {
        return Err(Error::InvalidParameter("normalizations f(0) must be nonzero".into()));
    }
    if [tau, f0_b, f0_c].iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("tau and f(0) must be finite".into()));
    }
    let (mu, nu) = equation.weights();
    if mu.norm() == 0.0 || nu.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate splitting: both weights must be nonzero".into(),
        ));
    }

    let mut a = vec![f0_b * f0_c, tau * f0_b * f0_c];
    let mut b = vec![f0_b, a[1] * mu / f0_c];
    let mut c = vec![f0_c, a[1] * nu / f0_b];
    let mut consistency = vec![0.0, 0.0];

    for k in 2..=order {
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        let eqs: Vec<(Complex64, Complex64, f64)> = (1..k)
            .map(|i| {
                let binom = binomial(k, i);
                let w = mu.powi(i as i32) * nu.powi((k - i) as i32) * binom;
                (w, b[i] * c[k - i], binom)
            })
            .collect();
        for (w, r, _) in &eqs {
            num += w.conj() * r;
            den += w.norm_sqr();
        }
        let ak = num / den;
        let spread = eqs
            .iter()
            .map(|(w, r, binom)| (w * ak - r).norm() / binom)
            .fold(0.0, f64::max);
        a.push(ak);
        b.push(ak * mu.powi(k as i32) / f0_c);
        c.push(ak * nu.powi(k as i32) / f0_b);
        consistency.push(spread);
    }
    if a.iter().chain(&b).chain(&c).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }

    Ok(SeriesSolution {
        equation,
        order,
        tau,
        f0_b,
        f0_c,
        a: SeriesPoly::new(a),
        b: SeriesPoly::new(b),
        c: SeriesPoly::new(c),
        consistency,
    })
}
