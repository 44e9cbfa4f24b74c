//! Coherent states generated from an extremal (lowest-weight) reference
//! state by exponentiating raising operators.
//!
//! Only two instances are registered: the truncated Heisenberg–Weyl
//! oscillator (`a†` raising the vacuum) and the spin-j irrep of su(2)
//! (`J₊` raising `|j,−j⟩`). In both, the raising operator is nilpotent on the
//! finite basis so `exp(τE)` applied to the reference is a finite sum.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock;
use crate::qcore::{LinearOperator, SpaceDescriptor, SpinJ, StateVector};
use crate::spin;

/// How the normalization factor `N(τ) = exp(Σ γ_i(τ) Λ_i)` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationRule {
    /// Central element with weight 1 and `γ = −|τ|²/2`.
    HeisenbergWeyl,
    /// `J₀` with weight `−j` and `γ = ln(1 + |τ|²)`.
    Su2,
}

#[derive(Debug, Clone)]
pub struct LowestWeightModel {
    pub space: SpaceDescriptor,
    pub lowest: StateVector,
    pub raising: Vec<LinearOperator>,
    pub cartan: Vec<LinearOperator>,
    pub weights: Vec<f64>,
    pub rule: NormalizationRule,
}

impl LowestWeightModel {
    pub fn heisenberg_weyl(cutoff: usize) -> Result<Self> {
        let space = SpaceDescriptor::fock(cutoff);
        let (_, adag) = fock::ladder_ops(cutoff)?;
        Ok(Self {
            lowest: StateVector::basis(space.clone(), 0)?,
            raising: vec![adag],
            cartan: vec![LinearOperator::identity(space.clone())],
            weights: vec![1.0],
            space,
            rule: NormalizationRule::HeisenbergWeyl,
        })
    }

    pub fn su2(j: SpinJ) -> Result<Self> {
        let space = SpaceDescriptor::spin(j);
        let ops = spin::spin_ops(j);
        Ok(Self {
            lowest: StateVector::basis(space.clone(), 0)?,
            raising: vec![ops.plus],
            cartan: vec![ops.zero],
            weights: vec![-j.value()],
            space,
            rule: NormalizationRule::Su2,
        })
    }

    /// `γ_i(τ)` for the single registered root.
    pub fn gamma(&self, tau: Complex64) -> f64 {
        match self.rule {
            NormalizationRule::HeisenbergWeyl => -0.5 * tau.norm_sqr(),
            NormalizationRule::Su2 => tau.norm_sqr().ln_1p(),
        }
    }

    pub fn normalization(&self, tau: Complex64) -> f64 {
        (self.gamma(tau) * self.weights[0]).exp()
    }

    /// `exp(τE)|lowest⟩` without normalization, summed until the nilpotent
    /// series terminates.
    pub fn raise_exponential(&self, tau: Complex64) -> nalgebra::DVector<Complex64> {
        let e = self.raising[0].matrix();
        let mut term = self.lowest.amps().clone();
        let mut sum = term.clone();
        for k in 1..=self.space.dim() {
            term = (e * &term) * (tau / k as f64);
            if term.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                break;
            }
            sum += &term;
        }
        sum
    }

    /// `N(τ) exp(τE)|lowest⟩`, renormalized if truncation lost weight.
    pub fn coherent_state(&self, tau: Complex64) -> Result<StateVector> {
        let v = self.raise_exponential(tau) * Complex64::new(self.normalization(tau), 0.0);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-15 {
            log::debug!(
                "renormalizing coherent state on {} at tau = {tau}: norm {norm:.17e}",
                self.space
            );
        }
        StateVector::new(self.space.clone(), v)
    }

    /// max over lowering operators of ‖E₋|lowest⟩‖.
    pub fn lowest_weight_defect(&self) -> f64 {
        self.raising
            .iter()
            .map(|e| (e.adjoint().matrix() * self.lowest.amps()).norm())
            .fold(0.0, f64::max)
    }

    /// True if every Cartan operator is diagonal in the basis.
    pub fn cartan_is_diagonal(&self) -> bool {
        self.cartan.iter().all(|h| {
            let m = h.matrix();
            (0..m.nrows()).all(|i| (0..m.ncols()).all(|k| i == k || m[(i, k)].norm() == 0.0))
        })
    }
}
