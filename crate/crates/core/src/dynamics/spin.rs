use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{check_grid, Stepper, STEPS_PER_PERIOD};
use crate::error::{Error, Result};
use crate::fit::{fit_spin_cs, SpinFit};
use crate::qcore::{Factor, LinearOperator, StateVector};
use crate::spin::spin_ops;
use crate::SpinJ;

const HERMITIAN_TOL: f64 = 1e-12;

/// `H = β₀ J₀ + β₊ J₊ + β₋ J₋` with `β₀` real and `β₋ = β₊*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearSpinHamiltonian {
    beta0: f64,
    beta_plus: Complex64,
}

impl LinearSpinHamiltonian {
    pub fn new(beta0: Complex64, beta_plus: Complex64, beta_minus: Complex64) -> Result<Self> {
        let vals = [beta0, beta_plus, beta_minus];
        if vals.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        if beta0.im.abs() > HERMITIAN_TOL || (beta_minus - beta_plus.conj()).norm() > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(
                "Hamiltonian is not Hermitian: need beta0 real and beta_minus = conj(beta_plus)".into(),
            ));
        }
        Ok(Self {
            beta0: beta0.re,
            beta_plus,
        })
    }

    /// `ω J₀`.
    pub fn precession(omega: f64) -> Self {
        Self {
            beta0: omega,
            beta_plus: Complex64::new(0.0, 0.0),
        }
    }

    /// `Ω (J₊ + J₋)/2`.
    pub fn rabi(omega_r: f64) -> Self {
        Self {
            beta0: 0.0,
            beta_plus: Complex64::new(omega_r / 2.0, 0.0),
        }
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta_plus(&self) -> Complex64 {
        self.beta_plus
    }

    pub fn beta_minus(&self) -> Complex64 {
        self.beta_plus.conj()
    }

    /// Rotation rate `√(β₀² + 4|β₊|²)` of the induced precession.
    pub fn rotation_rate(&self) -> f64 {
        (self.beta0 * self.beta0 + 4.0 * self.beta_plus.norm_sqr()).sqrt()
    }

    pub fn operator(&self, j: SpinJ) -> Result<LinearOperator> {
        let ops = spin_ops(j);
        let m = ops.zero.matrix() * Complex64::new(self.beta0, 0.0)
            + ops.plus.matrix() * self.beta_plus
            + ops.minus.matrix() * self.beta_minus();
        LinearOperator::hermitian(ops.zero.space().clone(), m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Best-fitting coherent-state parameters per time.
    pub zeta_track: Vec<SpinFit>,
    /// Maximal overlap with a spin coherent state per time.
    pub cs_fidelity: Vec<f64>,
}

/// Integrates `h` on spin `j` from `initial` at `t = 0`. `max_dt` defaults
/// to one 400th of the precession period.
pub fn evolve_spin(
    h: &LinearSpinHamiltonian,
    j: SpinJ,
    t_grid: &[f64],
    initial: &StateVector,
    max_dt: Option<f64>,
) -> Result<SpinTrajectory> {
    check_grid(t_grid)?;
    match initial.space().single() {
        Some(Factor::Spin { two_j }) if two_j == j.twice() => {}
        _ => {
            return Err(Error::SpaceMismatch {
                expected: format!("spin {j}"),
                found: initial.space().to_string(),
            })
        }
    }
    let h_matrix: DMatrix<Complex64> = h.operator(j)?.matrix().clone();
    let rate = h.rotation_rate();
    let max_dt = match max_dt {
        Some(dt) if dt.is_finite() && dt > 0.0 => dt,
        Some(dt) => return Err(Error::InvalidParameter(format!("max_dt must be positive, got {dt}"))),
        None if rate > 0.0 => std::f64::consts::TAU / rate / STEPS_PER_PERIOD,
        None => f64::INFINITY,
    };
    let mut stepper = Stepper::new(|_| h_matrix.clone(), true);

    let mut out = SpinTrajectory {
        times: Vec::with_capacity(t_grid.len()),
        states: Vec::with_capacity(t_grid.len()),
        zeta_track: Vec::with_capacity(t_grid.len()),
        cs_fidelity: Vec::with_capacity(t_grid.len()),
    };
    let mut psi = initial.amps().clone();
    let mut t_now = 0.0;
    let mut hint = None;
    for &t in t_grid {
        stepper.advance(&mut psi, t_now, t, max_dt)?;
        t_now = t;
        let state = StateVector::new(initial.space().clone(), psi.clone())?;
        let fit = fit_spin_cs(&state, hint)?;
        hint = Some(fit.point);
        out.times.push(t);
        out.cs_fidelity.push(fit.fidelity);
        out.zeta_track.push(fit);
        out.states.push(state);
    }
    Ok(out)
}
