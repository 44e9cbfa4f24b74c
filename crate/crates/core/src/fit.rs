//! Nearest coherent state to a given state, by maximizing the overlap over
//! the two real parameters of the coherent-state family.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead_restarted, newton_polish_2d, NelderMeadOptions};
use crate::qcore::{Factor, StateVector};
use crate::spin::{spin_ops, SpinPoint};
use crate::SpinJ;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinFit {
    pub point: SpinPoint,
    pub theta: f64,
    pub phi: f64,
    /// max over ζ of |⟨j,ζ|ψ⟩|.
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlauberFit {
    pub alpha: Complex64,
    pub fidelity: f64,
}

fn fit_options() -> NelderMeadOptions {
    NelderMeadOptions {
        initial_step: 0.1,
        f_tol: 1e-15,
        x_tol: 1e-10,
        max_evals: 4_000,
    }
}

// Stereographic charts of the sphere. `North` uses ζ itself, `South` uses
// w = 1/ζ, so each chart stays bounded near the point it covers.
#[derive(Debug, Clone, Copy)]
enum Chart {
    North,
    South,
}

fn binomials(n: u32) -> Vec<f64> {
    let mut row = vec![1.0; n as usize + 1];
    for k in 1..=n as usize {
        row[k] = row[k - 1] * (n as usize + 1 - k) as f64 / k as f64;
    }
    row.iter().map(|b| b.sqrt()).collect()
}

fn spin_cs_amps(chart: Chart, z: Complex64, sqrt_binom: &[f64]) -> DVector<Complex64> {
    let two_j = sqrt_binom.len() - 1;
    let mut v = DVector::zeros(two_j + 1);
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 0..=two_j {
        let idx = match chart {
            Chart::North => k,
            Chart::South => two_j - k,
        };
        v[idx] = pow * sqrt_binom[idx];
        pow *= z;
    }
    v.unscale((1.0 + z.norm_sqr()).powf(two_j as f64 / 2.0))
}

// 1 − |⟨c|ψ⟩|² evaluated as ‖ψ − ⟨c|ψ⟩c‖², which keeps full relative
// precision close to a perfect fit.
fn misfit(c: &DVector<Complex64>, psi: &DVector<Complex64>) -> f64 {
    let ov = c.dotc(psi);
    psi.iter().zip(c.iter()).map(|(p, q)| (p - ov * q).norm_sqr()).sum()
}

fn chart_start(theta: f64, phi: f64) -> (Chart, Complex64) {
    let t = theta / 2.0;
    if theta <= std::f64::consts::FRAC_PI_2 {
        (Chart::North, -Complex64::from_polar(t.tan(), -phi))
    } else {
        (Chart::South, -Complex64::from_polar(1.0 / t.tan(), phi))
    }
}

fn chart_point(chart: Chart, z: Complex64) -> SpinPoint {
    match chart {
        Chart::North => SpinPoint::Zeta(z),
        Chart::South if z.norm() == 0.0 => SpinPoint::Angles {
            theta: std::f64::consts::PI,
            phi: 0.0,
        },
        Chart::South => SpinPoint::Zeta(z.inv()),
    }
}

fn single_spin(s: &StateVector) -> Result<SpinJ> {
    match s.space().single() {
        Some(Factor::Spin { two_j }) => Ok(SpinJ::from_twice(two_j)),
        _ => Err(Error::SpaceMismatch {
            expected: "single spin factor".into(),
            found: s.space().to_string(),
        }),
    }
}

/// Direction of the spin coherent state suggested by ⟨J⟩, as `(θ, φ)`.
fn moment_direction(j: SpinJ, s: &StateVector) -> Result<Option<(f64, f64)>> {
    let ops = spin_ops(j);
    let jx = ops.x().expectation(s)?.re;
    let jy = ops.y().expectation(s)?.re;
    let jz = ops.zero.expectation(s)?.re;
    let r = (jx * jx + jy * jy + jz * jz).sqrt();
    if r < 1e-9 {
        return Ok(None);
    }
    // ⟨J⟩ of |j,ζ(θ,φ)⟩ points along −n(θ,φ).
    let (nx, ny, nz) = (-jx / r, -jy / r, -jz / r);
    Ok(Some((nz.clamp(-1.0, 1.0).acos(), ny.atan2(nx).rem_euclid(std::f64::consts::TAU))))
}

/// Spin coherent state maximizing `|⟨j,ζ|s⟩|`. `hint` (for example the
/// previous point of a trajectory) is tried first.
pub fn fit_spin_cs(s: &StateVector, hint: Option<SpinPoint>) -> Result<SpinFit> {
    let j = single_spin(s)?;
    let sqrt_binom = binomials(j.twice());
    let psi = s.amps();

    let mut starts: Vec<(f64, f64)> = Vec::new();
    if let Some(h) = hint {
        starts.push(h.angles());
    }
    if let Some(d) = moment_direction(j, s)? {
        starts.push(d);
    }
    use std::f64::consts::{FRAC_PI_2, PI};
    starts.extend([
        (0.0, 0.0),
        (PI, 0.0),
        (FRAC_PI_2, 0.0),
        (FRAC_PI_2, FRAC_PI_2),
        (FRAC_PI_2, PI),
        (FRAC_PI_2, 1.5 * PI),
    ]);

    let mut best: Option<(Chart, Complex64, f64)> = None;
    for (i, &(theta, phi)) in starts.iter().enumerate() {
        let (chart, z0) = chart_start(theta, phi);
        let objective = |x: &[f64]| misfit(&spin_cs_amps(chart, Complex64::new(x[0], x[1]), &sqrt_binom), psi);
        let m = nelder_mead_restarted(objective, &[z0.re, z0.im], &fit_options(), 4);
        let improves = best.is_none_or(|(_, _, v)| m.value < v - 1e-14);
        if improves {
            best = Some((chart, Complex64::new(m.x[0], m.x[1]), m.value));
        }
        // A warm start that already fits almost perfectly needs no multistart.
        if i == 0 && hint.is_some() && m.value < 1e-10 {
            break;
        }
    }
    let (chart, z, _) = best.expect("at least one start");

    // A chart coordinate beyond the unit disc is better served by the other
    // chart; switch before polishing.
    let (chart, z) = match chart {
        Chart::North if z.norm() > 1.0 => (Chart::South, z.inv()),
        Chart::South if z.norm() > 1.0 => (Chart::North, z.inv()),
        _ => (chart, z),
    };
    let objective = |x: &[f64]| misfit(&spin_cs_amps(chart, Complex64::new(x[0], x[1]), &sqrt_binom), psi);
    let (x, _) = newton_polish_2d(objective, [z.re, z.im], 1e-4, 8);
    let z = Complex64::new(x[0], x[1]);
    let fidelity = spin_cs_amps(chart, z, &sqrt_binom).dotc(psi).norm();
    let point = chart_point(chart, z);
    let (theta, phi) = point.angles();
    Ok(SpinFit {
        point,
        theta,
        phi,
        fidelity,
    })
}

/// Truncated Glauber amplitudes `αⁿ/√n!`, normalized over `n ≤ cutoff`.
pub(crate) fn glauber_amplitudes(alpha: Complex64, cutoff: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(cutoff + 1);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..=cutoff {
        v[n] = term;
        term *= alpha / ((n + 1) as f64).sqrt();
    }
    let norm = v.norm();
    v.unscale(norm)
}

/// Truncated Glauber state maximizing `|⟨α|s⟩|`.
pub fn fit_glauber_cs(s: &StateVector, hint: Option<Complex64>) -> Result<GlauberFit> {
    let cutoff = match s.space().single() {
        Some(Factor::Fock { cutoff }) => cutoff,
        _ => {
            return Err(Error::SpaceMismatch {
                expected: "single Fock factor".into(),
                found: s.space().to_string(),
            })
        }
    };
    let psi = s.amps();
    // ⟨a⟩ as the moment estimate.
    let mut mean = Complex64::new(0.0, 0.0);
    for n in 1..=cutoff {
        mean += psi[n - 1].conj() * psi[n] * (n as f64).sqrt();
    }

    let mut starts = Vec::new();
    if let Some(h) = hint {
        starts.push(h);
    }
    starts.push(mean);
    starts.push(Complex64::new(0.0, 0.0));
    for r in [0.8, 1.6] {
        for k in 0..8 {
            starts.push(Complex64::from_polar(r, k as f64 * std::f64::consts::FRAC_PI_4));
        }
    }

    let objective = |x: &[f64]| misfit(&glauber_amplitudes(Complex64::new(x[0], x[1]), psi.len() - 1), psi);
    let mut best: Option<(Complex64, f64)> = None;
    for (i, a0) in starts.iter().enumerate() {
        let m = nelder_mead_restarted(objective, &[a0.re, a0.im], &fit_options(), 4);
        if best.is_none_or(|(_, v)| m.value < v - 1e-14) {
            best = Some((Complex64::new(m.x[0], m.x[1]), m.value));
        }
        if i == 0 && hint.is_some() && m.value < 1e-10 {
            break;
        }
    }
    let (a, _) = best.expect("at least one start");
    let (x, _) = newton_polish_2d(objective, [a.re, a.im], 1e-4, 8);
    let alpha = Complex64::new(x[0], x[1]);
    Ok(GlauberFit {
        alpha,
        fidelity: glauber_amplitudes(alpha, cutoff).dotc(psi).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::glauber_cs;
    use crate::spin::{basis_state, spin_cs, spin_cs_zeta, SpinCsParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn recovers_spin_zeta_in_both_charts() {
        for two_j in [1, 2, 5] {
            let j = SpinJ::from_twice(two_j);
            for zeta in [c(0.0, 0.0), c(0.5, 0.0), c(-0.3, 0.8), c(2.0, -1.5), c(0.0, 7.0)] {
                let s = spin_cs_zeta(j, zeta).unwrap();
                let fit = fit_spin_cs(&s, None).unwrap();
                assert!((fit.fidelity - 1.0).abs() < 1e-12, "{two_j} {zeta}: {}", fit.fidelity);
                let z = fit.point.zeta().unwrap();
                assert!((z - zeta).norm() < 1e-8 * (1.0 + zeta.norm_sqr()), "{zeta} vs {z}");
            }
        }
    }

    #[test]
    fn recovers_antipode() {
        let s = spin_cs(SpinCsParams {
            j: SpinJ::ONE,
            point: SpinPoint::Angles {
                theta: std::f64::consts::PI,
                phi: 0.0,
            },
        })
        .unwrap();
        let fit = fit_spin_cs(&s, None).unwrap();
        assert!((fit.fidelity - 1.0).abs() < 1e-12);
        assert!((fit.theta - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn m_zero_state_is_not_coherent() {
        let s = basis_state(SpinJ::ONE, 0).unwrap();
        let fit = fit_spin_cs(&s, None).unwrap();
        // max over the equator of |⟨1,ζ|1,0⟩| = √2|ζ|/(1+|ζ|²) = 1/√2
        assert!((fit.fidelity - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn recovers_glauber_alpha() {
        for alpha in [c(0.0, 0.0), c(0.5, 0.0), c(-0.7, 1.1), c(2.0, 0.3)] {
            let s = glauber_cs(alpha, 40).unwrap();
            let fit = fit_glauber_cs(&s, None).unwrap();
            assert!((fit.fidelity - 1.0).abs() < 1e-12);
            assert!((fit.alpha - alpha).norm() < 1e-8, "{alpha} vs {}", fit.alpha);
        }
    }
}
