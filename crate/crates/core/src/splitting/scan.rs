use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_glauber_cs, fit_spin_cs, glauber_amplitudes};
use crate::fock::{check_truncation, split_fock, SplitSpec};
use crate::qcore::{schmidt_cut, SpaceDescriptor, StateVector};
use crate::random::{haar_state, sample_rng};
use crate::spin::{spin_cs, split_spin, SpinCsParams, SpinPoint};
use crate::SpinJ;

/// Samples closer than this to their nearest coherent state are not counted
/// as non-coherent.
pub const CS_GUARD_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScanSystem {
    /// Balanced beamsplitter on `fock(cutoff)`.
    Fock { cutoff: usize },
    /// Stretched coupling `j_A → j_B ⊗ j_C` (values stored as `2j`).
    Spin {
        two_j_a: SpinJ,
        two_j_b: SpinJ,
        two_j_c: SpinJ,
    },
}

impl ScanSystem {
    fn input_space(&self) -> SpaceDescriptor {
        match *self {
            ScanSystem::Fock { cutoff } => SpaceDescriptor::fock(cutoff),
            ScanSystem::Spin { two_j_a, .. } => SpaceDescriptor::spin(two_j_a),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ScanSystem::Fock { cutoff: 0 } => {
                Err(Error::InvalidParameter("Fock cutoff must be at least 1".into()))
            }
            ScanSystem::Fock { .. } => Ok(()),
            ScanSystem::Spin {
                two_j_a,
                two_j_b,
                two_j_c,
            } => {
                if two_j_a.twice() != two_j_b.twice() + two_j_c.twice() {
                    return Err(Error::WeightConditionViolated {
                        two_ja: two_j_a.twice(),
                        two_jbc: two_j_b.twice() + two_j_c.twice(),
                    });
                }
                if two_j_b.twice() == 0 || two_j_c.twice() == 0 {
                    return Err(Error::InvalidParameter("subsystem spins must be at least 1/2".into()));
                }
                Ok(())
            }
        }
    }

    fn split(&self, s: &StateVector) -> Result<StateVector> {
        match *self {
            ScanSystem::Fock { .. } => split_fock(s, SplitSpec::balanced()),
            ScanSystem::Spin {
                two_j_b, two_j_c, ..
            } => split_spin(s, two_j_b, two_j_c),
        }
    }

    /// Phase-aligned distance from `s` to its fitted nearest coherent state.
    fn cs_distance(&self, s: &StateVector) -> Result<f64> {
        let nearest = match *self {
            ScanSystem::Fock { cutoff } => {
                let fit = fit_glauber_cs(s, None)?;
                StateVector::new(s.space().clone(), glauber_amplitudes(fit.alpha, cutoff))?
            }
            ScanSystem::Spin { two_j_a, .. } => {
                let fit = fit_spin_cs(s, None)?;
                spin_cs(SpinCsParams {
                    j: two_j_a,
                    point: SpinPoint::Angles {
                        theta: fit.theta,
                        phi: fit.phi,
                    },
                })?
            }
        };
        s.phase_aligned_distance(&nearest)
    }

    fn cs_grid(&self) -> Result<Vec<StateVector>> {
        use std::f64::consts::{PI, TAU};
        match *self {
            ScanSystem::Fock { cutoff } => {
                // Largest radius whose truncation is still accepted.
                let mut r_max = 0.0;
                while check_truncation(Complex64::new(r_max + 0.01, 0.0), cutoff).is_ok() && r_max < 50.0 {
                    r_max += 0.01;
                }
                let mut out = Vec::new();
                for ir in 0..=6 {
                    let r = r_max * ir as f64 / 6.0;
                    for k in 0..12 {
                        let alpha = Complex64::from_polar(r, TAU * k as f64 / 12.0);
                        out.push(StateVector::new(
                            SpaceDescriptor::fock(cutoff),
                            glauber_amplitudes(alpha, cutoff),
                        )?);
                    }
                }
                Ok(out)
            }
            ScanSystem::Spin { two_j_a, .. } => {
                let mut out = Vec::new();
                for it in 0..=12 {
                    for k in 0..12 {
                        out.push(spin_cs(SpinCsParams {
                            j: two_j_a,
                            point: SpinPoint::Angles {
                                theta: PI * it as f64 / 12.0,
                                phi: TAU * k as f64 / 12.0,
                            },
                        })?);
                    }
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanStats {
    pub system: ScanSystem,
    pub n_samples: usize,
    pub seed: u64,
    /// `None` when every sample fell inside the coherent-state guard band.
    pub min_entropy_non_cs: Option<f64>,
    pub cs_max_entropy: f64,
    pub n_excluded: usize,
}

/// Splits `n_samples` seeded Haar-random states and a grid of coherent
/// states, recording the split entropies. Sample `i` uses stream `i` of
/// `seed`, so the result does not depend on thread scheduling.
pub fn uniqueness_scan(system: ScanSystem, n_samples: usize, seed: u64) -> Result<ScanStats> {
    system.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let space = system.input_space();

    let samples: Vec<(f64, bool)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let s = haar_state(space.clone(), &mut sample_rng(seed, i as u64))?;
            let entropy = schmidt_cut(&system.split(&s)?, 1)?.entropy_bits;
            let excluded = system.cs_distance(&s)? < CS_GUARD_DISTANCE;
            Ok((entropy, excluded))
        })
        .collect::<Result<_>>()?;

    let cs_entropies: Vec<f64> = system
        .cs_grid()?
        .par_iter()
        .map(|s| Ok(schmidt_cut(&system.split(s)?, 1)?.entropy_bits))
        .collect::<Result<_>>()?;

    let n_excluded = samples.iter().filter(|(_, ex)| *ex).count();
    let min_entropy_non_cs = samples
        .iter()
        .filter(|(_, ex)| !ex)
        .map(|(e, _)| *e)
        .reduce(f64::min);
    log::debug!("scan {system:?}: {n_excluded} of {n_samples} samples inside the CS guard band");
    Ok(ScanStats {
        system,
        n_samples,
        seed,
        min_entropy_non_cs,
        cs_max_entropy: cs_entropies.into_iter().fold(0.0, f64::max),
        n_excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin_system() -> ScanSystem {
        ScanSystem::Spin {
            two_j_a: SpinJ::ONE,
            two_j_b: SpinJ::HALF,
            two_j_c: SpinJ::HALF,
        }
    }

    #[test]
    fn small_spin_scan_separates_cs_from_random_states() {
        let stats = uniqueness_scan(spin_system(), 40, 11).unwrap();
        assert!(stats.cs_max_entropy < 1e-9);
        assert!(stats.min_entropy_non_cs.unwrap() > 1e-4);
        assert_eq!(stats.n_excluded, 0);
    }

    #[test]
    fn identical_seeds_identical_stats() {
        let a = uniqueness_scan(spin_system(), 16, 5).unwrap();
        let b = uniqueness_scan(spin_system(), 16, 5).unwrap();
        assert_eq!(a, b);
        let c = uniqueness_scan(spin_system(), 16, 6).unwrap();
        assert_ne!(a.min_entropy_non_cs, c.min_entropy_non_cs);
    }

    #[test]
    fn coherent_state_is_excluded() {
        let s = spin_cs(SpinCsParams {
            j: SpinJ::ONE,
            point: SpinPoint::Zeta(Complex64::new(0.3, -0.2)),
        })
        .unwrap();
        assert!(spin_system().cs_distance(&s).unwrap() < CS_GUARD_DISTANCE);
    }

    #[test]
    fn non_stretched_system_rejected() {
        let bad = ScanSystem::Spin {
            two_j_a: SpinJ::HALF,
            two_j_b: SpinJ::HALF,
            two_j_c: SpinJ::HALF,
        };
        assert!(matches!(
            uniqueness_scan(bad, 4, 0),
            Err(Error::WeightConditionViolated { .. })
        ));
    }

    #[test]
    fn fock_scan_runs() {
        let stats = uniqueness_scan(ScanSystem::Fock { cutoff: 6 }, 8, 3).unwrap();
        assert!(stats.cs_max_entropy < 1e-9, "{}", stats.cs_max_entropy);
        assert!(stats.min_entropy_non_cs.unwrap() > 1e-4);
    }
}
