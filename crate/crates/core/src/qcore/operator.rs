use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::SpaceDescriptor;
use super::state::StateVector;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Dense operator on a space. `hermitian` is a verified hint.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: SpaceDescriptor,
    matrix: DMatrix<Complex64>,
    hermitian: bool,
}

/// Mean and (for Hermitian operators) variance of an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: Complex64,
    pub variance: Option<f64>,
}

impl LinearOperator {
    pub fn new(space: SpaceDescriptor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_shape(&space, &matrix)?;
        Ok(Self {
            space,
            matrix,
            hermitian: false,
        })
    }

    /// Builds an operator flagged Hermitian, checking max|M - M†| < 1e-12.
    pub fn hermitian(space: SpaceDescriptor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_shape(&space, &matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev >= HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "operator is not Hermitian (max |M - M†| = {dev:e})"
            )));
        }
        Ok(Self {
            space,
            matrix,
            hermitian: true,
        })
    }

    pub fn identity(space: SpaceDescriptor) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: DMatrix::identity(d, d),
            hermitian: true,
        }
    }

    pub fn zero(space: SpaceDescriptor) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: DMatrix::zeros(d, d),
            hermitian: true,
        }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Re-checks Hermiticity and sets the flag if it holds.
    pub fn into_hermitian(self) -> Result<Self> {
        Self::hermitian(self.space, self.matrix)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &LinearOperator) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
            hermitian: false,
        })
    }

    pub fn add(&self, rhs: &LinearOperator) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        })
    }

    pub fn sub(&self, rhs: &LinearOperator) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
            hermitian: self.hermitian && rhs.hermitian,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    /// `[self, rhs]`.
    pub fn commutator(&self, rhs: &LinearOperator) -> Result<Self> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    /// `self ⊗ rhs` on the concatenated space.
    pub fn kron(&self, rhs: &LinearOperator) -> Self {
        Self {
            space: self.space.tensor(&rhs.space),
            matrix: self.matrix.kronecker(&rhs.matrix),
            hermitian: self.hermitian && rhs.hermitian,
        }
    }

    /// Largest entry modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &LinearOperator) -> Result<f64> {
        self.space.ensure_same(&rhs.space)?;
        Ok((&self.matrix - &rhs.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// Matrix-vector product without normalization.
    pub fn apply(&self, s: &StateVector) -> Result<DVector<Complex64>> {
        self.space.ensure_same(s.space())?;
        Ok(&self.matrix * s.amps())
    }

    /// Matrix-vector product followed by normalization.
    pub fn apply_normalized(&self, s: &StateVector) -> Result<StateVector> {
        let v = self.apply(s)?;
        StateVector::new(self.space.clone(), v)
    }

    /// ⟨s|op|s⟩ and, for Hermitian operators, ⟨op²⟩ − ⟨op⟩².
    pub fn moments(&self, s: &StateVector) -> Result<Moments> {
        let image = self.apply(s)?;
        let mean = s.amps().dotc(&image);
        let variance = self
            .hermitian
            .then(|| image.norm_squared() - mean.re * mean.re);
        Ok(Moments { mean, variance })
    }

    /// ⟨s|op|s⟩.
    pub fn expectation(&self, s: &StateVector) -> Result<Complex64> {
        Ok(s.amps().dotc(&self.apply(s)?))
    }
}

fn check_shape(space: &SpaceDescriptor, matrix: &DMatrix<Complex64>) -> Result<()> {
    let d = space.dim();
    if matrix.nrows() != d || matrix.ncols() != d {
        return Err(Error::SpaceMismatch {
            expected: format!("{space} ({d}×{d})"),
            found: format!("{}×{} matrix", matrix.nrows(), matrix.ncols()),
        });
    }
    Ok(())
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Free-function form of [`LinearOperator::moments`].
pub fn moments(op: &LinearOperator, s: &StateVector) -> Result<Moments> {
    op.moments(s)
}
