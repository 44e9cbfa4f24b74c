use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin quantum number stored as the integer `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinJ(u32);

impl SpinJ {
    pub const HALF: SpinJ = SpinJ(1);
    pub const ONE: SpinJ = SpinJ(2);

    pub fn from_twice(two_j: u32) -> Self {
        SpinJ(two_j)
    }

    /// Parses a non-negative half-integer such as `1.5`.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.0 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "spin j = {j} is not a non-negative half-integer"
            )));
        }
        Ok(SpinJ(twice.round() as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }
}

impl fmt::Display for SpinJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// One tensor factor of a Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Factor {
    /// Fock space truncated at photon number `cutoff` (dimension `cutoff + 1`).
    Fock { cutoff: usize },
    /// Spin-j irrep, basis ordered by m ascending from -j.
    Spin { two_j: u32 },
}

impl Factor {
    pub fn spin(j: SpinJ) -> Self {
        Factor::Spin { two_j: j.twice() }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Factor::Fock { cutoff } => cutoff + 1,
            Factor::Spin { two_j } => two_j as usize + 1,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Factor::Fock { cutoff } => write!(f, "fock(N={cutoff})"),
            Factor::Spin { two_j } => write!(f, "spin(j={})", SpinJ(two_j)),
        }
    }
}

/// Ordered list of tensor factors. Composite amplitudes are stored row-major
/// with the leftmost factor varying slowest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    factors: Vec<Factor>,
}

impl SpaceDescriptor {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter(
                "a space needs at least one factor".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn fock(cutoff: usize) -> Self {
        Self {
            factors: vec![Factor::Fock { cutoff }],
        }
    }

    pub fn spin(j: SpinJ) -> Self {
        Self {
            factors: vec![Factor::spin(j)],
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).product()
    }

    pub fn is_composite(&self) -> bool {
        self.factors.len() > 1
    }

    /// Concatenates factor lists, `self` on the left.
    pub fn tensor(&self, other: &SpaceDescriptor) -> SpaceDescriptor {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SpaceDescriptor { factors }
    }

    /// Splits into the spaces left and right of `cut` (a factor index).
    pub fn split_at(&self, cut: usize) -> Result<(SpaceDescriptor, SpaceDescriptor)> {
        if !self.is_composite() {
            return Err(Error::NotComposite(self.to_string()));
        }
        if cut == 0 || cut >= self.factors.len() {
            return Err(Error::InvalidParameter(format!(
                "cut {cut} does not split {} into two nonempty groups",
                self
            )));
        }
        Ok((
            SpaceDescriptor {
                factors: self.factors[..cut].to_vec(),
            },
            SpaceDescriptor {
                factors: self.factors[cut..].to_vec(),
            },
        ))
    }

    /// The single factor of a non-composite space.
    pub fn single(&self) -> Option<Factor> {
        match self.factors.as_slice() {
            [f] => Some(*f),
            _ => None,
        }
    }

    pub(crate) fn ensure_same(&self, other: &SpaceDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊗ ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}
