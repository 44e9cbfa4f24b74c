//! Finite-dimensional Hilbert-space kernel: spaces, states, dense operators,
//! the matrix exponential and Schmidt analysis.

mod expm;
mod operator;
mod schmidt;
mod space;
mod state;

pub use expm::{expm, mat_exp};
pub use operator::{moments, LinearOperator, Moments};
pub use schmidt::{
    amplitude_matrix, entropy_bits, schmidt_cut, schmidt_decompose, SchmidtDecomposition,
    SchmidtReport, PRODUCT_THRESHOLD_BITS,
};
pub use space::{Factor, SpaceDescriptor, SpinJ};
pub use state::{overlap, tensor_state, StateVector};

/// Norm-preserving linear map from one space into another (`matrix` is
/// `dim(output) × dim(input)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitIsometry {
    pub input: SpaceDescriptor,
    pub output: SpaceDescriptor,
    pub matrix: nalgebra::DMatrix<num_complex::Complex64>,
}

impl SplitIsometry {
    pub fn apply(&self, s: &StateVector) -> crate::Result<StateVector> {
        self.input.ensure_same(s.space())?;
        StateVector::new(self.output.clone(), &self.matrix * s.amps())
    }

    /// max |V†V − I|.
    pub fn isometry_defect(&self) -> f64 {
        let n = self.matrix.ncols();
        let g = self.matrix.adjoint() * &self.matrix;
        (g - nalgebra::DMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}
