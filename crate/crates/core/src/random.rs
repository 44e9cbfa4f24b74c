//! Seeded, counter-indexed randomness: sample `i` of a run with seed `s`
//! always draws from the same ChaCha stream, regardless of thread schedule.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::qcore::{SpaceDescriptor, StateVector};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-random pure state: normalized vector of i.i.d. standard complex
/// Gaussians.
pub fn haar_state<R: rand::Rng>(space: SpaceDescriptor, rng: &mut R) -> Result<StateVector> {
    let amps = DVector::from_fn(space.dim(), |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    StateVector::new(space, amps)
}
