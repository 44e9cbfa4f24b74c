//! Coherent states of the oscillator (Heisenberg–Weyl) and of SU(2):
//! construction, splitting into subsystems, factorization analysis, CHSH
//! evaluation and classical phase-space trajectories.

pub mod bell;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod fock;
pub mod lowest_weight;
pub mod optim;
pub mod qcore;
pub mod random;
pub mod spin;
pub mod splitting;

pub use error::{Error, Result};
pub use lowest_weight::{LowestWeightModel, NormalizationRule};
pub use qcore::SpinJ;
