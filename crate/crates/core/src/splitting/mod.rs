//! Factorization analysis of split states, the order-by-order solution of
//! the splitting functional equation, and randomized uniqueness scans.

mod scan;
mod series;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{schmidt_decompose, tensor_state, StateVector};

pub use scan::{uniqueness_scan, ScanStats, ScanSystem};
pub use series::{
    solve_splitting_series, first_failing_order, max_residual, order_residual, FunctionalEquation,
    SeriesPoly, SeriesSolution,
};

/// Leading Schmidt coefficient at or above which the leading Schmidt
/// vectors are reported as the factors.
pub const FACTOR_THRESHOLD: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub entropy_bits: f64,
    pub is_product: bool,
    pub schmidt_coefficients: Vec<f64>,
    pub factor_b: Option<StateVector>,
    pub factor_c: Option<StateVector>,
    /// ‖s − factor_B ⊗ factor_C‖ with the leading Schmidt term as ansatz.
    pub residual: f64,
}

/// Schmidt analysis of a two-factor state.
pub fn factorization_report(s: &StateVector) -> Result<FactorizationReport> {
    if s.space().factors().len() != 2 {
        return Err(Error::NotComposite(format!(
            "expected two factors, found {}",
            s.space()
        )));
    }
    let dec = schmidt_decompose(s, 1)?;
    let (b, c) = dec.leading_factors()?;
    let leading = dec.report.coefficients[0];
    // Fold the phase of ⟨b⊗c|s⟩ into b so that the residual is literally
    // ‖s − b⊗c‖.
    let ov = tensor_state(&b, &c).overlap(s)?;
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    let b = StateVector::new(b.space().clone(), b.amps() * phase)?;
    let residual = (s.amps() - tensor_state(&b, &c).amps()).norm();
    let keep = leading >= FACTOR_THRESHOLD;
    Ok(FactorizationReport {
        entropy_bits: dec.report.entropy_bits,
        is_product: dec.report.is_product,
        schmidt_coefficients: dec.report.coefficients.clone(),
        factor_b: keep.then_some(b),
        factor_c: keep.then_some(c),
        residual,
    })
}
