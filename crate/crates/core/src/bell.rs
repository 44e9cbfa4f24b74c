//! CHSH quantity on bipartite pure states: dichotomic observables, the
//! two-qubit correlation-matrix maximum, and analytic or multistart
//! maximization.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead_restarted, NelderMeadOptions};
use crate::qcore::{amplitude_matrix, expm, schmidt_decompose, LinearOperator, SpaceDescriptor, StateVector};
use crate::random::sample_rng;
use crate::SpinJ;

const UNIT_TOL: f64 = 1e-12;

/// How an observable was parameterized.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableParams {
    /// `n·σ` on a two-dimensional factor.
    Direction { n: [f64; 3] },
    /// `n·σ` on a two-dimensional subspace spanned by `basis`, identity on
    /// its complement.
    Subspace { n: [f64; 3], basis: Vec<Vec<[f64; 2]>> },
    /// `U diag(signs) U†` with `U = exp(iH)` and `H` built from `generator`.
    UnitarySigns { generator: Vec<f64>, signs: Vec<i8> },
}

/// Hermitian involution: spectrum in {+1, −1}.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomicObservable {
    pub operator: LinearOperator,
    pub params: ObservableParams,
}

impl DichotomicObservable {
    /// Parameters as a flat list: `(θ, φ)` of the direction for qubit forms,
    /// the generator entries for the unitary form.
    pub fn angles(&self) -> Vec<f64> {
        match &self.params {
            ObservableParams::Direction { n } | ObservableParams::Subspace { n, .. } => {
                let (theta, phi) = direction_angles(n);
                vec![theta, phi]
            }
            ObservableParams::UnitarySigns { generator, .. } => generator.clone(),
        }
    }

    /// max |O² − I|.
    pub fn involution_defect(&self) -> f64 {
        let m = self.operator.matrix();
        let d = m.nrows();
        (m * m - DMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn direction_angles(n: &[f64; 3]) -> (f64, f64) {
    (n[2].clamp(-1.0, 1.0).acos(), n[1].atan2(n[0]).rem_euclid(std::f64::consts::TAU))
}

fn direction_from_angles(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `n·σ` in the (index 0, index 1) basis, with `σ = 2J` for spin ½.
fn pauli_combination(n: &[f64; 3]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[c(-n[2], 0.0), c(n[0], n[1]), c(n[0], -n[1]), c(n[2], 0.0)],
    )
}

fn pauli(k: usize) -> DMatrix<Complex64> {
    let mut n = [0.0; 3];
    n[k] = 1.0;
    pauli_combination(&n)
}

fn check_unit(n: &[f64; 3]) -> Result<()> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(norm));
    }
    Ok(())
}

/// `n·(2J)` on the spin-½ space.
pub fn qubit_observable(n: [f64; 3]) -> Result<DichotomicObservable> {
    qubit_observable_on(SpaceDescriptor::spin(SpinJ::HALF), n)
}

/// `n·σ` on any two-dimensional single-factor space.
pub fn qubit_observable_on(space: SpaceDescriptor, n: [f64; 3]) -> Result<DichotomicObservable> {
    check_unit(&n)?;
    if space.dim() != 2 {
        return Err(Error::SpaceMismatch {
            expected: "two-dimensional factor".into(),
            found: space.to_string(),
        });
    }
    Ok(DichotomicObservable {
        operator: LinearOperator::hermitian(space, pauli_combination(&n))?,
        params: ObservableParams::Direction { n },
    })
}

/// `E n·σ E† + (I − E E†)` where the columns of `E` are orthonormal.
fn subspace_observable(
    space: SpaceDescriptor,
    basis: [&nalgebra::DVector<Complex64>; 2],
    n: [f64; 3],
) -> Result<DichotomicObservable> {
    check_unit(&n)?;
    let d = space.dim();
    let e = DMatrix::from_columns(&[basis[0].clone(), basis[1].clone()]);
    let proj = &e * e.adjoint();
    let m = &e * pauli_combination(&n) * e.adjoint() + DMatrix::identity(d, d) - proj;
    let m = (&m + m.adjoint()) * c(0.5, 0.0);
    Ok(DichotomicObservable {
        operator: LinearOperator::hermitian(space, m)?,
        params: ObservableParams::Subspace {
            n,
            basis: basis
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        },
    })
}

fn hermitian_from_params(d: usize, g: &[f64]) -> DMatrix<Complex64> {
    let mut h = DMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = c(g[i], 0.0);
    }
    let mut idx = d;
    for i in 0..d {
        for k in i + 1..d {
            let z = c(g[idx], g[idx + 1]);
            h[(i, k)] = z;
            h[(k, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// `U diag(signs) U†` with `U = exp(iH)`; `generator` has `d²` entries
/// (diagonal of `H`, then real and imaginary parts of the upper triangle).
pub fn unitary_observable(
    space: SpaceDescriptor,
    generator: &[f64],
    signs: &[i8],
) -> Result<DichotomicObservable> {
    let d = space.dim();
    if generator.len() != d * d || signs.len() != d {
        return Err(Error::InvalidParameter(format!(
            "unitary observable on dimension {d} needs {} generator entries and {d} signs",
            d * d
        )));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidParameter("signs must be +1 or -1".into()));
    }
    let u = expm(&(hermitian_from_params(d, generator) * c(0.0, 1.0)))?;
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        signs.iter().map(|&s| c(s as f64, 0.0)),
    ));
    let m = &u * diag * u.adjoint();
    let m = (&m + m.adjoint()) * c(0.5, 0.0);
    Ok(DichotomicObservable {
        operator: LinearOperator::hermitian(space, m)?,
        params: ObservableParams::UnitarySigns {
            generator: generator.to_vec(),
            signs: signs.to_vec(),
        },
    })
}

/// `B(σ), B(σ′)` on the first factor and `C(ρ), C(ρ′)` on the second.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSettings {
    pub b_sigma: DichotomicObservable,
    pub b_sigma_prime: DichotomicObservable,
    pub c_rho: DichotomicObservable,
    pub c_rho_prime: DichotomicObservable,
}

impl ChshSettings {
    pub fn observables(&self) -> [&DichotomicObservable; 4] {
        [&self.b_sigma, &self.b_sigma_prime, &self.c_rho, &self.c_rho_prime]
    }
}

fn bipartite(s: &StateVector) -> Result<(SpaceDescriptor, SpaceDescriptor, DMatrix<Complex64>)> {
    if s.space().factors().len() != 2 {
        return Err(Error::NotComposite(format!(
            "expected two factors, found {}",
            s.space()
        )));
    }
    amplitude_matrix(s, 1)
}

fn correlation_of(m: &DMatrix<Complex64>, b: &DMatrix<Complex64>, cm: &DMatrix<Complex64>) -> f64 {
    // ⟨ψ|B⊗C|ψ⟩ = Tr(M† B M Cᵀ)
    (m.adjoint() * b * m * cm.transpose()).trace().re
}

/// `⟨B ⊗ C⟩`.
pub fn correlation(s: &StateVector, b: &DichotomicObservable, cobs: &DichotomicObservable) -> Result<f64> {
    let (left, right, m) = bipartite(s)?;
    left.ensure_same(b.operator.space())?;
    right.ensure_same(cobs.operator.space())?;
    Ok(correlation_of(&m, b.operator.matrix(), cobs.operator.matrix()))
}

/// `⟨C(ρ)B(σ)⟩ + ⟨C(ρ)B(σ′)⟩ + ⟨C(ρ′)B(σ)⟩ − ⟨C(ρ′)B(σ′)⟩`.
pub fn chsh_value(s: &StateVector, settings: &ChshSettings) -> Result<f64> {
    let e = |b: &DichotomicObservable, cobs: &DichotomicObservable| correlation(s, b, cobs);
    Ok(e(&settings.b_sigma, &settings.c_rho)? + e(&settings.b_sigma_prime, &settings.c_rho)?
        + e(&settings.b_sigma, &settings.c_rho_prime)?
        - e(&settings.b_sigma_prime, &settings.c_rho_prime)?)
}

fn two_qubit_matrix(s: &StateVector) -> Result<DMatrix<Complex64>> {
    let (left, right, m) = bipartite(s).map_err(|_| Error::NotTwoQubit(s.space().to_string()))?;
    if left.dim() != 2 || right.dim() != 2 {
        return Err(Error::NotTwoQubit(s.space().to_string()));
    }
    Ok(m)
}

fn correlation_matrix_of(m: &DMatrix<Complex64>) -> Matrix3<f64> {
    let p = [pauli(0), pauli(1), pauli(2)];
    Matrix3::from_fn(|k, l| correlation_of(m, &p[k], &p[l]))
}

/// `T_kl = ⟨σ_k ⊗ σ_l⟩` with `(x, y, z)` ordering.
pub fn correlation_matrix(s: &StateVector) -> Result<Matrix3<f64>> {
    Ok(correlation_matrix_of(&two_qubit_matrix(s)?))
}

/// Sorted singular triples `(t_k, u_k, v_k)` of `T`.
fn sorted_svd(t: &Matrix3<f64>) -> Vec<(f64, Vector3<f64>, Vector3<f64>)> {
    let svd = t.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut triples: Vec<_> = (0..3)
        .map(|k| (svd.singular_values[k], u.column(k).into_owned(), vt.row(k).transpose()))
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));
    triples
}

/// `2√(t₁² + t₂²)` from the two largest singular values of `T`.
pub fn horodecki_max(s: &StateVector) -> Result<f64> {
    let t = sorted_svd(&correlation_matrix(s)?);
    Ok(2.0 * (t[0].0 * t[0].0 + t[1].0 * t[1].0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChshStrategy {
    AnalyticQubit,
    MultistartLocalSearch { n_starts: usize, seed: u64, tol: f64 },
}

impl ChshStrategy {
    pub const DEFAULT_STARTS: usize = 32;
    pub const DEFAULT_TOL: f64 = 1e-7;

    pub fn multistart(seed: u64) -> Self {
        ChshStrategy::MultistartLocalSearch {
            n_starts: Self::DEFAULT_STARTS,
            seed,
            tol: Self::DEFAULT_TOL,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChshStrategy::AnalyticQubit => "analytic-qubit",
            ChshStrategy::MultistartLocalSearch { .. } => "multistart-local-search",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshOutcome {
    pub max_value: f64,
    pub settings: ChshSettings,
    pub strategy: ChshStrategy,
}

impl ChshOutcome {
    /// True when the maximum exceeds the classical bound by more than
    /// `tol`. False means no violation was found, which for a numerical
    /// search is not a proof that none exists.
    pub fn violation_found(&self, tol: f64) -> bool {
        self.max_value > 2.0 + tol
    }
}

/// Maximizes the CHSH quantity over dichotomic observables.
pub fn chsh_maximize(s: &StateVector, strategy: ChshStrategy) -> Result<ChshOutcome> {
    let (left, right, _) = bipartite(s)?;
    let settings = match strategy {
        ChshStrategy::AnalyticQubit => analytic_settings(s, &left, &right)?,
        ChshStrategy::MultistartLocalSearch { n_starts, seed, tol } => {
            if n_starts == 0 || tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidParameter("n_starts must be positive and tol > 0".into()));
            }
            if left.dim() == 2 && right.dim() == 2 {
                multistart_qubit(s, &left, &right, n_starts, seed, tol)?
            } else {
                multistart_unitary(s, &left, &right, n_starts, seed, tol)?
            }
        }
    };
    Ok(ChshOutcome {
        max_value: chsh_value(s, &settings)?,
        settings,
        strategy,
    })
}

fn optimal_directions(t: &Matrix3<f64>) -> [[f64; 3]; 4] {
    let sv = sorted_svd(t);
    let (t1, t2) = (sv[0].0, sv[1].0);
    let gamma = t2.atan2(t1);
    let (u1, u2, v1, v2) = (sv[0].1, sv[1].1, sv[0].2, sv[1].2);
    let unit = |v: Vector3<f64>| {
        let v = v.normalize();
        [v[0], v[1], v[2]]
    };
    [
        unit(u1 * gamma.cos() + u2 * gamma.sin()),
        unit(u1 * gamma.cos() - u2 * gamma.sin()),
        unit(v1),
        unit(v2),
    ]
}

fn analytic_settings(s: &StateVector, left: &SpaceDescriptor, right: &SpaceDescriptor) -> Result<ChshSettings> {
    if left.dim() == 2 && right.dim() == 2 {
        let [bs, bsp, cr, crp] = optimal_directions(&correlation_matrix(s)?);
        return Ok(ChshSettings {
            b_sigma: qubit_observable_on(left.clone(), bs)?,
            b_sigma_prime: qubit_observable_on(left.clone(), bsp)?,
            c_rho: qubit_observable_on(right.clone(), cr)?,
            c_rho_prime: qubit_observable_on(right.clone(), crp)?,
        });
    }
    // Schmidt rank ≤ 2: the state lives on qubit subspaces of each factor.
    let dec = schmidt_decompose(s, 1)?;
    let rank = dec.report.coefficients.iter().filter(|&&x| x > 1e-12).count();
    if rank > 2 || left.dim() < 2 || right.dim() < 2 {
        return Err(Error::StrategyUnavailable(format!(
            "analytic route needs two qubits or Schmidt rank <= 2 (state on {} has rank {rank})",
            s.space()
        )));
    }
    let complete = |vs: &[nalgebra::DVector<Complex64>]| -> [nalgebra::DVector<Complex64>; 2] {
        let first = vs[0].clone();
        let second = if rank == 2 {
            vs[1].clone()
        } else {
            orthonormal_complement(&first)
        };
        [first, second]
    };
    let lb = complete(&dec.left);
    let rb = complete(&dec.right);
    let coeffs = [dec.report.coefficients[0], if rank == 2 { dec.report.coefficients[1] } else { 0.0 }];
    let m_eff = DMatrix::from_row_slice(2, 2, &[c(coeffs[0], 0.0), c(0.0, 0.0), c(0.0, 0.0), c(coeffs[1], 0.0)]);
    let [bs, bsp, cr, crp] = optimal_directions(&correlation_matrix_of(&m_eff));
    Ok(ChshSettings {
        b_sigma: subspace_observable(left.clone(), [&lb[0], &lb[1]], bs)?,
        b_sigma_prime: subspace_observable(left.clone(), [&lb[0], &lb[1]], bsp)?,
        c_rho: subspace_observable(right.clone(), [&rb[0], &rb[1]], cr)?,
        c_rho_prime: subspace_observable(right.clone(), [&rb[0], &rb[1]], crp)?,
    })
}

fn orthonormal_complement(v: &nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
    // Gram–Schmidt against the basis vector least aligned with v.
    let k = (0..v.len())
        .min_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
        .unwrap_or(0);
    let mut e = nalgebra::DVector::zeros(v.len());
    e[k] = c(1.0, 0.0);
    let w = &e - v * v.dotc(&e);
    let n = w.norm();
    w.unscale(n)
}

fn search_options(tol: f64) -> NelderMeadOptions {
    NelderMeadOptions {
        initial_step: 0.4,
        f_tol: tol,
        x_tol: tol.sqrt(),
        max_evals: 20_000,
    }
}

fn best_of(results: Vec<(f64, Vec<f64>)>) -> (f64, Vec<f64>) {
    // Ties go to the lowest start index, independent of scheduling.
    results
        .into_iter()
        .reduce(|best, cand| if cand.0 > best.0 { cand } else { best })
        .expect("n_starts > 0")
}

fn multistart_qubit(
    s: &StateVector,
    left: &SpaceDescriptor,
    right: &SpaceDescriptor,
    n_starts: usize,
    seed: u64,
    tol: f64,
) -> Result<ChshSettings> {
    // For qubit directions ⟨(b·σ)⊗(c·σ)⟩ = bᵀ T c, so the search evaluates
    // the bilinear form; the final value is recomputed from the operators.
    let t = correlation_matrix(s)?;
    let value = |x: &[f64]| {
        let d: Vec<Vector3<f64>> = (0..4)
            .map(|k| Vector3::from(direction_from_angles(x[2 * k], x[2 * k + 1])))
            .collect();
        let e = |b: &Vector3<f64>, cv: &Vector3<f64>| b.dot(&(t * cv));
        e(&d[0], &d[2]) + e(&d[1], &d[2]) + e(&d[0], &d[3]) - e(&d[1], &d[3])
    };
    let results: Vec<(f64, Vec<f64>)> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let x0: Vec<f64> = (0..4)
                .flat_map(|_| {
                    [
                        rng.random_range(0.0..std::f64::consts::PI),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    ]
                })
                .collect();
            let m = nelder_mead_restarted(|x| -value(x), &x0, &search_options(tol), 6);
            (-m.value, m.x)
        })
        .collect();
    let (_, x) = best_of(results);
    let obs = |k: usize, space: &SpaceDescriptor| {
        qubit_observable_on(space.clone(), direction_from_angles(x[2 * k], x[2 * k + 1]))
    };
    Ok(ChshSettings {
        b_sigma: obs(0, left)?,
        b_sigma_prime: obs(1, left)?,
        c_rho: obs(2, right)?,
        c_rho_prime: obs(3, right)?,
    })
}

/// Counts of `+1` eigenvalues in the balanced sign set for dimension `d`.
fn balanced_plus_counts(d: usize) -> Vec<usize> {
    if d.is_multiple_of(2) {
        vec![d / 2]
    } else {
        vec![d / 2, d / 2 + 1]
    }
}

fn sign_pattern(d: usize, plus: usize) -> Vec<i8> {
    (0..d).map(|i| if i < plus { 1 } else { -1 }).collect()
}

fn multistart_unitary(
    s: &StateVector,
    left: &SpaceDescriptor,
    right: &SpaceDescriptor,
    n_starts: usize,
    seed: u64,
    tol: f64,
) -> Result<ChshSettings> {
    let (db, dc) = (left.dim(), right.dim());
    let (pb, pc) = (balanced_plus_counts(db), balanced_plus_counts(dc));
    let combos: Vec<[Vec<i8>; 4]> = {
        let mut out = Vec::new();
        for &p0 in &pb {
            for &p1 in &pb {
                for &p2 in &pc {
                    for &p3 in &pc {
                        out.push([
                            sign_pattern(db, p0),
                            sign_pattern(db, p1),
                            sign_pattern(dc, p2),
                            sign_pattern(dc, p3),
                        ]);
                    }
                }
            }
        }
        out
    };
    let (nb, nc) = (db * db, dc * dc);
    let build = |x: &[f64], signs: &[Vec<i8>; 4]| -> Result<ChshSettings> {
        Ok(ChshSettings {
            b_sigma: unitary_observable(left.clone(), &x[..nb], &signs[0])?,
            b_sigma_prime: unitary_observable(left.clone(), &x[nb..2 * nb], &signs[1])?,
            c_rho: unitary_observable(right.clone(), &x[2 * nb..2 * nb + nc], &signs[2])?,
            c_rho_prime: unitary_observable(right.clone(), &x[2 * nb + nc..], &signs[3])?,
        })
    };
    let results: Vec<(f64, Vec<f64>)> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let signs = &combos[i % combos.len()];
            let mut rng = sample_rng(seed, i as u64);
            let x0: Vec<f64> = (0..2 * (nb + nc))
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let objective = |x: &[f64]| match build(x, signs).and_then(|st| chsh_value(s, &st)) {
                Ok(v) => -v,
                Err(_) => f64::INFINITY,
            };
            let m = nelder_mead_restarted(objective, &x0, &search_options(tol), 6);
            let mut tagged = m.x;
            tagged.push((i % combos.len()) as f64);
            (-m.value, tagged)
        })
        .collect();
    let (_, mut x) = best_of(results);
    let combo = x.pop().expect("combo tag") as usize;
    build(&x, &combos[combo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::StateVector;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn half() -> SpaceDescriptor {
        SpaceDescriptor::spin(SpinJ::HALF)
    }

    fn two_qubit(amps: &[Complex64]) -> StateVector {
        StateVector::from_slice(half().tensor(&half()), amps).unwrap()
    }

    fn triplet() -> StateVector {
        // (|↑↓⟩ + |↓↑⟩)/√2, basis order ↓↓, ↓↑, ↑↓, ↑↑
        two_qubit(&[c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)])
    }

    #[test]
    fn z_and_x_observables() {
        let z = qubit_observable([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(z.operator.matrix()[(0, 0)], c(-1.0, 0.0));
        assert_eq!(z.operator.matrix()[(1, 1)], c(1.0, 0.0));
        let x = qubit_observable([1.0, 0.0, 0.0]).unwrap();
        let eig = x.operator.matrix().clone().symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!(x.involution_defect() < 1e-15);
        assert!(matches!(qubit_observable([1.0, 1.0, 0.0]), Err(Error::NotUnit(_))));
    }

    #[test]
    fn aligned_z_settings_on_down_down() {
        let dd = two_qubit(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let mz = qubit_observable([0.0, 0.0, -1.0]).unwrap();
        let settings = ChshSettings {
            b_sigma: mz.clone(),
            b_sigma_prime: mz.clone(),
            c_rho: mz.clone(),
            c_rho_prime: mz,
        };
        assert!((chsh_value(&dd, &settings).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn triplet_reaches_tsirelson() {
        let s = triplet();
        assert!((horodecki_max(&s).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
        let out = chsh_maximize(&s, ChshStrategy::AnalyticQubit).unwrap();
        assert!((out.max_value - 2.0 * SQRT_2).abs() < 1e-8);
        let num = chsh_maximize(&s, ChshStrategy::multistart(1)).unwrap();
        assert!((num.max_value - 2.0 * SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn product_state_maximum_is_two() {
        let s = two_qubit(&[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((horodecki_max(&s).unwrap() - 2.0).abs() < 1e-10);
        let num = chsh_maximize(&s, ChshStrategy::multistart(3)).unwrap();
        assert!((num.max_value - 2.0).abs() < 1e-6);
        assert!(!num.violation_found(1e-6));
    }

    #[test]
    fn horodecki_rejects_larger_factors() {
        let s = StateVector::basis(half().tensor(&SpaceDescriptor::spin(SpinJ::ONE)), 0).unwrap();
        assert!(matches!(horodecki_max(&s), Err(Error::NotTwoQubit(_))));
    }

    #[test]
    fn unitary_observable_is_involution() {
        let space = SpaceDescriptor::spin(SpinJ::ONE);
        let g: Vec<f64> = (0..9).map(|k| (k as f64 * 0.7).sin()).collect();
        let o = unitary_observable(space, &g, &[1, -1, -1]).unwrap();
        assert!(o.involution_defect() < 1e-12);
        let tr = o.operator.matrix().trace();
        assert!((tr - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn schmidt_rank_two_uses_effective_qubits() {
        // (|0⟩|1⟩ + |1⟩|0⟩)/√2 inside spin-1 ⊗ spin-1
        let one = SpaceDescriptor::spin(SpinJ::ONE);
        let mut amps = vec![c(0.0, 0.0); 9];
        amps[1] = c(FRAC_1_SQRT_2, 0.0);
        amps[3] = c(FRAC_1_SQRT_2, 0.0);
        let s = StateVector::from_slice(one.tensor(&one), &amps).unwrap();
        let out = chsh_maximize(&s, ChshStrategy::AnalyticQubit).unwrap();
        assert!((out.max_value - 2.0 * SQRT_2).abs() < 1e-10);
        for o in out.settings.observables() {
            assert!(o.involution_defect() < 1e-12);
        }
    }

    #[test]
    fn analytic_unavailable_for_rank_three() {
        let one = SpaceDescriptor::spin(SpinJ::ONE);
        let mut amps = vec![c(0.0, 0.0); 9];
        amps[0] = c(1.0, 0.0);
        amps[4] = c(1.0, 0.0);
        amps[8] = c(1.0, 0.0);
        let s = StateVector::from_slice(one.tensor(&one), &amps).unwrap();
        assert!(matches!(
            chsh_maximize(&s, ChshStrategy::AnalyticQubit),
            Err(Error::StrategyUnavailable(_))
        ));
    }

    #[test]
    fn higher_dimensional_search_finds_violation() {
        let one = SpaceDescriptor::spin(SpinJ::ONE);
        let mut amps = vec![c(0.0, 0.0); 9];
        amps[0] = c(1.0, 0.0);
        amps[4] = c(1.0, 0.0);
        amps[8] = c(1.0, 0.0);
        let s = StateVector::from_slice(one.tensor(&one), &amps).unwrap();
        let out = chsh_maximize(
            &s,
            ChshStrategy::MultistartLocalSearch {
                n_starts: 4,
                seed: 2,
                tol: 1e-7,
            },
        )
        .unwrap();
        assert!(out.violation_found(1e-6), "{}", out.max_value);
        assert!(out.max_value <= 2.0 * SQRT_2 + 1e-6);
    }
}
