//! Truncated single-mode Fock space: ladder and quadrature operators, the
//! displacement operator, Glauber coherent states and beamsplitter splitting.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lowest_weight::LowestWeightModel;
use crate::qcore::{mat_exp, Factor, LinearOperator, SpaceDescriptor, SplitIsometry, StateVector};

/// Probability mass allowed beyond the cutoff.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Beamsplitter amplitudes in `a_A† = μ a_B† + ν a_C†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub mu: Complex64,
    pub nu: Complex64,
}

impl SplitSpec {
    pub fn new(mu: Complex64, nu: Complex64) -> Result<Self> {
        let total = mu.norm_sqr() + nu.norm_sqr();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|mu|^2 + |nu|^2 = {total} (must be 1)"
            )));
        }
        Ok(Self { mu, nu })
    }

    /// 50:50 splitter, `μ = ν = 1/√2`.
    pub fn balanced() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { mu: h, nu: h }
    }

    /// `μ = cos t`, `ν = sin t · e^{iφ}`.
    pub fn from_angles(t: f64, phi: f64) -> Self {
        Self {
            mu: Complex64::new(t.cos(), 0.0),
            nu: Complex64::from_polar(t.sin(), phi),
        }
    }
}

fn require_cutoff(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("Fock cutoff must be at least 1".into()));
    }
    Ok(())
}

/// Annihilation and creation operators with `a[n−1, n] = √n`.
pub fn ladder_ops(cutoff: usize) -> Result<(LinearOperator, LinearOperator)> {
    require_cutoff(cutoff)?;
    let d = cutoff + 1;
    let a = DMatrix::from_fn(d, d, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let space = SpaceDescriptor::fock(cutoff);
    let adag = a.adjoint();
    Ok((
        LinearOperator::new(space.clone(), a)?,
        LinearOperator::new(space, adag)?,
    ))
}

pub fn number_op(cutoff: usize) -> Result<LinearOperator> {
    require_cutoff(cutoff)?;
    let d = cutoff + 1;
    let m = DMatrix::from_fn(d, d, |r, c| {
        Complex64::new(if r == c { r as f64 } else { 0.0 }, 0.0)
    });
    LinearOperator::hermitian(SpaceDescriptor::fock(cutoff), m)
}

/// `q = (a + a†)/√2`, `p = (a − a†)/(i√2)`.
pub fn quadrature_ops(cutoff: usize) -> Result<(LinearOperator, LinearOperator)> {
    let (a, adag) = ladder_ops(cutoff)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (a.matrix() + adag.matrix()) * Complex64::new(s, 0.0);
    let p = (a.matrix() - adag.matrix()) * Complex64::new(0.0, -s);
    let space = SpaceDescriptor::fock(cutoff);
    Ok((
        LinearOperator::hermitian(space.clone(), q)?,
        LinearOperator::hermitian(space, p)?,
    ))
}

/// Smallest cutoff satisfying `N ≥ |α|² + 12√(|α|² + 1)`.
pub fn required_cutoff(alpha: Complex64) -> usize {
    let x = alpha.norm_sqr();
    (x + 12.0 * (x + 1.0).sqrt()).ceil() as usize
}

/// Poisson mass `Σ_{n>N} e^{−|α|²}|α|^{2n}/n!` beyond the cutoff.
pub fn tail_mass(alpha: Complex64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut ln_fact: f64 = (1..=cutoff + 1).map(|k| (k as f64).ln()).sum();
    let mut sum = 0.0;
    let mut n = cutoff + 1;
    loop {
        let term = (-x + n as f64 * ln_x - ln_fact).exp();
        sum += term;
        if (term < 1e-18 * sum && n as f64 > x) || n > cutoff + 10_000 {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    sum
}

/// Accepts `(α, N)` when the cutoff rule holds or the Poisson tail beyond `N`
/// is already below [`TAIL_TOLERANCE`].
pub fn check_truncation(alpha: Complex64, cutoff: usize) -> Result<()> {
    let required = required_cutoff(alpha);
    if cutoff >= required || tail_mass(alpha, cutoff) < TAIL_TOLERANCE {
        Ok(())
    } else {
        Err(Error::TruncationTooSmall {
            alpha_abs: alpha.norm(),
            cutoff,
            required,
        })
    }
}

/// `D(α) = exp(α a† − α* a)` on the truncated space.
pub fn displacement(alpha: Complex64, cutoff: usize) -> Result<LinearOperator> {
    check_truncation(alpha, cutoff)?;
    let (a, adag) = ladder_ops(cutoff)?;
    let generator = adag.scale(alpha).sub(&a.scale(alpha.conj()))?;
    mat_exp(&generator)
}

/// Number state `|n⟩` in a space with the given cutoff.
pub fn fock_state(n: usize, cutoff: usize) -> Result<StateVector> {
    StateVector::basis(SpaceDescriptor::fock(cutoff), n)
}

/// Glauber state with amplitudes `e^{−|α|²/2} αⁿ/√n!`, renormalized after
/// truncation.
pub fn glauber_cs(alpha: Complex64, cutoff: usize) -> Result<StateVector> {
    check_truncation(alpha, cutoff)?;
    LowestWeightModel::heisenberg_weyl(cutoff)?.coherent_state(alpha)
}

fn sqrt_binomial(n: usize, k: usize) -> f64 {
    let ln: f64 = (1..=n).map(|i| (i as f64).ln()).sum::<f64>()
        - (1..=k).map(|i| (i as f64).ln()).sum::<f64>()
        - (1..=n - k).map(|i| (i as f64).ln()).sum::<f64>();
    (0.5 * ln).exp()
}

/// Isometry `V|n⟩ = (μ a_B† + ν a_C†)ⁿ/√n! |0,0⟩` from `fock(n_in)` into
/// `fock(n_out) ⊗ fock(n_out)`.
pub fn beamsplit_isometry(spec: SplitSpec, n_in: usize, n_out: usize) -> Result<SplitIsometry> {
    if n_out < n_in {
        return Err(Error::InsufficientOutputCutoff {
            input: n_in,
            output: n_out,
        });
    }
    let d_out = n_out + 1;
    let mut v = DMatrix::zeros(d_out * d_out, n_in + 1);
    for n in 0..=n_in {
        for k in 0..=n {
            let amp = spec.mu.powi(k as i32) * spec.nu.powi((n - k) as i32) * sqrt_binomial(n, k);
            v[(k * d_out + (n - k), n)] = amp;
        }
    }
    let output = SpaceDescriptor::fock(n_out).tensor(&SpaceDescriptor::fock(n_out));
    Ok(SplitIsometry {
        input: SpaceDescriptor::fock(n_in),
        output,
        matrix: v,
    })
}

/// Splits a single-mode state into two modes with the output cutoffs equal
/// to the input cutoff.
pub fn split_fock(s: &StateVector, spec: SplitSpec) -> Result<StateVector> {
    let cutoff = match s.space().single() {
        Some(Factor::Fock { cutoff }) => cutoff,
        _ => {
            return Err(Error::SpaceMismatch {
                expected: "single Fock factor".into(),
                found: s.space().to_string(),
            })
        }
    };
    beamsplit_isometry(spec, cutoff, cutoff)?.apply(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::schmidt_cut;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ladder_action_on_low_states() {
        let (a, adag) = ladder_ops(5).unwrap();
        let one = fock_state(1, 5).unwrap();
        let zero = fock_state(0, 5).unwrap();
        assert!((a.apply(&one).unwrap() - zero.amps()).norm() < 1e-15);
        assert!((adag.apply(&zero).unwrap() - one.amps()).norm() < 1e-15);
        assert_eq!(a.apply(&zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn commutator_is_identity_except_at_cutoff() {
        let n = 8;
        let (a, adag) = ladder_ops(n).unwrap();
        let comm = a.commutator(&adag).unwrap();
        for k in 0..=n {
            let expected = if k < n { 1.0 } else { -(n as f64) };
            assert!((comm.matrix()[(k, k)] - c(expected, 0.0)).norm() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn zero_cutoff_rejected() {
        assert!(ladder_ops(0).is_err());
    }

    #[test]
    fn vacuum_quadratures() {
        let (q, p) = quadrature_ops(10).unwrap();
        let vac = fock_state(0, 10).unwrap();
        let mq = q.moments(&vac).unwrap();
        let mp = p.moments(&vac).unwrap();
        assert!(mq.mean.norm() < 1e-15);
        assert!((mq.variance.unwrap() - 0.5).abs() < 1e-14);
        assert!((mp.variance.unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn coherent_quadrature_means() {
        let (q, p) = quadrature_ops(40).unwrap();
        let s = glauber_cs(c(1.0, 0.0), 40).unwrap();
        let mq = q.moments(&s).unwrap();
        let mp = p.moments(&s).unwrap();
        assert!((mq.mean.re - SQRT_2).abs() < 1e-8);
        assert!((mq.variance.unwrap() - 0.5).abs() < 1e-8);
        assert!(mp.mean.norm() < 1e-8);
        assert!((mp.variance.unwrap() - 0.5).abs() < 1e-8);

        let s = glauber_cs(c(0.5, 0.0), 40).unwrap();
        assert!((q.moments(&s).unwrap().mean.re - SQRT_2 * 0.5).abs() < 1e-10);
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement(c(0.0, 0.0), 6).unwrap();
        assert!(d.max_abs_diff(&LinearOperator::identity(SpaceDescriptor::fock(6))).unwrap() < 1e-15);
    }

    #[test]
    fn displacement_route_matches_formula() {
        for alpha in [c(1.0, 0.0), c(-0.7, 1.1), c(0.0, 2.0), c(1.2, -1.5)] {
            let vac = fock_state(0, 40).unwrap();
            let displaced = displacement(alpha, 40).unwrap().apply(&vac).unwrap();
            let cs = glauber_cs(alpha, 40).unwrap();
            assert!((displaced - cs.amps()).norm() < 1e-10, "alpha = {alpha}");
        }
    }

    #[test]
    fn displacement_inverse_on_low_subspace() {
        let n = 40;
        let alpha = c(1.3, -0.4);
        let prod = displacement(alpha, n)
            .unwrap()
            .compose(&displacement(-alpha, n).unwrap())
            .unwrap();
        for col in 0..=n / 2 {
            for row in 0..=n {
                let expected = if row == col { 1.0 } else { 0.0 };
                assert!((prod.matrix()[(row, col)] - c(expected, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn vacuum_overlap() {
        let s = glauber_cs(c(1.0, 0.0), 40).unwrap();
        let vac = fock_state(0, 40).unwrap();
        let ov = vac.overlap(&s).unwrap();
        assert!((ov - c((-0.5f64).exp(), 0.0)).norm() < 1e-12);
        assert!((glauber_cs(c(0.0, 0.0), 3).unwrap().amps() - vac_amps(3)).norm() < 1e-15);
    }

    fn vac_amps(n: usize) -> nalgebra::DVector<Complex64> {
        fock_state(0, n).unwrap().amps().clone()
    }

    #[test]
    fn eigenstate_of_annihilation() {
        let alpha = c(1.0, 0.5);
        let s = glauber_cs(alpha, 40).unwrap();
        let (a, _) = ladder_ops(40).unwrap();
        let image = a.apply(&s).unwrap();
        assert!((image - s.amps() * alpha).norm() < 1e-8);
    }

    #[test]
    fn truncation_rule() {
        assert!(glauber_cs(c(2.0, 0.0), 20).is_err());
        assert!(matches!(
            displacement(c(3.0, 0.0), 10),
            Err(Error::TruncationTooSmall { .. })
        ));
        assert_eq!(required_cutoff(c(2.0, 0.0)), 31);
        assert!(tail_mass(c(2.0, 0.0), 31) < 1e-12);
        // Small cutoffs are fine when the tail is provably negligible.
        assert!(check_truncation(c(0.0, 0.0), 1).is_ok());
    }

    #[test]
    fn tail_mass_matches_direct_sum() {
        let alpha = c(1.5, 0.5);
        let x: f64 = alpha.norm_sqr();
        let mut direct = 0.0;
        let mut term = (-x).exp();
        for n in 0..200 {
            if n > 10 {
                direct += term;
            }
            term *= x / (n + 1) as f64;
        }
        assert!((tail_mass(alpha, 10) - direct).abs() < 1e-15 + 1e-10 * direct);
    }

    #[test]
    fn splitter_on_low_number_states() {
        let spec = SplitSpec::balanced();
        let v = beamsplit_isometry(spec, 3, 3).unwrap();
        assert!(v.isometry_defect() < 1e-12);
        let vac = v.apply(&fock_state(0, 3).unwrap()).unwrap();
        assert!((vac.amps()[0] - c(1.0, 0.0)).norm() < 1e-15);
        // |1⟩ → (|1,0⟩ + |0,1⟩)/√2; index(k_B, k_C) = 4 k_B + k_C
        let one = v.apply(&fock_state(1, 3).unwrap()).unwrap();
        assert!((one.amps()[4] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((one.amps()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn splitter_matches_repeated_creation() {
        // Independent route: apply (μ b† + ν c†) n times to |0,0⟩ and divide by √n!.
        let spec = SplitSpec::from_angles(0.4, 1.1);
        let n_in = 6;
        let (_, bdag) = ladder_ops(n_in).unwrap();
        let id = LinearOperator::identity(SpaceDescriptor::fock(n_in));
        let mode = bdag.kron(&id).scale(spec.mu).add(&id.kron(&bdag).scale(spec.nu)).unwrap();
        let v = beamsplit_isometry(spec, n_in, n_in).unwrap();
        let d = (n_in + 1) * (n_in + 1);
        let mut vec = nalgebra::DVector::<Complex64>::zeros(d);
        vec[0] = c(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..=n_in {
            if n > 0 {
                vec = mode.matrix() * &vec;
                fact *= n as f64;
            }
            let expected = &vec / c(fact.sqrt(), 0.0);
            assert!((v.matrix.column(n) - expected).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn output_cutoff_must_cover_input() {
        assert_eq!(
            beamsplit_isometry(SplitSpec::balanced(), 5, 4),
            Err(Error::InsufficientOutputCutoff { input: 5, output: 4 })
        );
    }

    #[test]
    fn coherent_state_splits_into_product() {
        let spec = SplitSpec::balanced();
        let alpha = c(1.0, 0.0);
        let out = split_fock(&glauber_cs(alpha, 30).unwrap(), spec).unwrap();
        let expected = glauber_cs(spec.mu * alpha, 30)
            .unwrap()
            .tensor(&glauber_cs(spec.nu * alpha, 30).unwrap());
        assert!(out.fidelity(&expected).unwrap() > 1.0 - 1e-8);
        assert!(schmidt_cut(&out, 1).unwrap().entropy_bits < 1e-9);
    }

    #[test]
    fn two_photon_state_entangles() {
        // (b† + c†)²/2 |0,0⟩ / √2! = (|2,0⟩ + √2|1,1⟩ + |0,2⟩)/2
        // amplitude matrix [[0,0,½],[0,1/√2,0],[½,0,0]] has singular values ½, 1/√2, ½
        let out = split_fock(&fock_state(2, 4).unwrap(), SplitSpec::balanced()).unwrap();
        let r = schmidt_cut(&out, 1).unwrap();
        assert!((r.entropy_bits - 1.5).abs() < 1e-12);
        assert!(r.entropy_bits > 0.5);
    }

    #[test]
    fn split_spec_validation() {
        assert!(SplitSpec::new(c(1.0, 0.0), c(0.1, 0.0)).is_err());
        assert!(SplitSpec::new(c(0.6, 0.0), c(0.0, 0.8)).is_ok());
    }
}
