use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::space::SpaceDescriptor;
use super::state::StateVector;
use crate::error::Result;

/// Entropy (bits) below which a bipartite pure state counts as a product.
pub const PRODUCT_THRESHOLD_BITS: f64 = 1e-9;

/// Schmidt coefficients across a cut and the entanglement entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtReport {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    pub entropy_bits: f64,
    pub is_product: bool,
}

/// Full decomposition `s = Σ_r c_r left_r ⊗ right_r`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub report: SchmidtReport,
    pub left_space: SpaceDescriptor,
    pub right_space: SpaceDescriptor,
    pub left: Vec<DVector<Complex64>>,
    pub right: Vec<DVector<Complex64>>,
}

impl SchmidtDecomposition {
    /// Rebuilds the amplitude vector from the decomposition.
    pub fn reconstruct(&self) -> DVector<Complex64> {
        let dim = self.left_space.dim() * self.right_space.dim();
        let mut out = DVector::zeros(dim);
        for ((c, l), r) in self
            .report
            .coefficients
            .iter()
            .zip(&self.left)
            .zip(&self.right)
        {
            out += l.kronecker(r) * Complex64::new(*c, 0.0);
        }
        out
    }

    /// Leading Schmidt vectors as normalized states.
    pub fn leading_factors(&self) -> Result<(StateVector, StateVector)> {
        Ok((
            StateVector::new(self.left_space.clone(), self.left[0].clone())?,
            StateVector::new(self.right_space.clone(), self.right[0].clone())?,
        ))
    }
}

/// Von Neumann entropy in bits of the squared coefficients, with 0·log 0 = 0.
pub fn entropy_bits(coefficients: &[f64]) -> f64 {
    let s: f64 = coefficients
        .iter()
        .map(|c| c * c)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// Amplitudes reshaped to a `dim(left) × dim(right)` matrix.
pub fn amplitude_matrix(s: &StateVector, cut: usize) -> Result<(SpaceDescriptor, SpaceDescriptor, DMatrix<Complex64>)> {
    let (left, right) = s.space().split_at(cut)?;
    let (dl, dr) = (left.dim(), right.dim());
    let m = DMatrix::from_fn(dl, dr, |i, k| s.amps()[i * dr + k]);
    Ok((left, right, m))
}

pub fn schmidt_decompose(s: &StateVector, cut: usize) -> Result<SchmidtDecomposition> {
    let (left_space, right_space, m) = amplitude_matrix(s, cut)?;
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let coefficients: Vec<f64> = order.iter().map(|&r| svd.singular_values[r].max(0.0)).collect();
    // M = U Σ V†, so the right Schmidt vectors are the rows of V† as columns.
    let left = order.iter().map(|&r| u.column(r).into_owned()).collect();
    let right = order
        .iter()
        .map(|&r| v_t.row(r).transpose().into_owned())
        .collect();

    let entropy = entropy_bits(&coefficients);
    Ok(SchmidtDecomposition {
        report: SchmidtReport {
            coefficients,
            entropy_bits: entropy,
            is_product: entropy < PRODUCT_THRESHOLD_BITS,
        },
        left_space,
        right_space,
        left,
        right,
    })
}

/// Schmidt analysis across the cut before factor index `cut`.
pub fn schmidt_cut(s: &StateVector, cut: usize) -> Result<SchmidtReport> {
    Ok(schmidt_decompose(s, cut)?.report)
}
