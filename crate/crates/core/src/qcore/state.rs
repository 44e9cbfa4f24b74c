use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::space::SpaceDescriptor;
use crate::error::{Error, Result};

/// Normalized pure state on a (possibly composite) space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceDescriptor,
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Builds a state and normalizes it.
    pub fn new(space: SpaceDescriptor, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::SpaceMismatch {
                expected: format!("{space} (dim {})", space.dim()),
                found: format!("vector of length {}", amps.len()),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            space,
            amps: amps.unscale(norm),
        })
    }

    pub fn from_slice(space: SpaceDescriptor, amps: &[Complex64]) -> Result<Self> {
        Self::new(space, DVector::from_column_slice(amps))
    }

    pub fn basis(space: SpaceDescriptor, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amps })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// ⟨self|other⟩ including phase.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// |⟨self|other⟩|.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            space: self.space.tensor(&other.space),
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// Distance after multiplying `other` by the phase that matches the
    /// largest-magnitude amplitude of `self`.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> Result<f64> {
        self.space.ensure_same(&other.space)?;
        let k = (0..self.amps.len())
            .max_by(|&a, &b| self.amps[a].norm().total_cmp(&self.amps[b].norm()))
            .unwrap_or(0);
        let (a, b) = (self.amps[k], other.amps[k]);
        let phase = if b.norm() > 1e-300 {
            let r = a / b;
            r / r.norm()
        } else {
            let ov = other.amps.dotc(&self.amps);
            if ov.norm() > 0.0 {
                ov / ov.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        };
        Ok((&self.amps - &other.amps * phase).norm())
    }
}

/// `u ⊗ v`.
pub fn tensor_state(u: &StateVector, v: &StateVector) -> StateVector {
    u.tensor(v)
}

/// ⟨u|v⟩.
pub fn overlap(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    u.overlap(v)
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    space: SpaceDescriptor,
    amps: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson {
            space: self.space.clone(),
            amps: self.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

// Deserialization keeps amplitudes verbatim so that a saved state reloads
// bit-identically; it only rejects vectors that are far from unit norm.
impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = StateJson::deserialize(deserializer)?;
        if raw.amps.len() != raw.space.dim() {
            return Err(D::Error::custom(format!(
                "expected {} amplitudes for {}, found {}",
                raw.space.dim(),
                raw.space,
                raw.amps.len()
            )));
        }
        let amps = DVector::from_iterator(
            raw.amps.len(),
            raw.amps.iter().map(|&[re, im]| Complex64::new(re, im)),
        );
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(D::Error::custom(format!(
                "state amplitudes must be normalized (norm = {norm})"
            )));
        }
        Ok(StateVector {
            space: raw.space,
            amps,
        })
    }
}
