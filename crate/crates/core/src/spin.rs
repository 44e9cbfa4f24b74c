//! Spin-j irreps of su(2), spin coherent states and the stretched
//! angular-momentum coupling `j_A = j_B + j_C`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lowest_weight::LowestWeightModel;
use crate::qcore::{mat_exp, Factor, LinearOperator, SpaceDescriptor, SpinJ, SplitIsometry, StateVector};

/// `J₀`, `J₊`, `J₋` in the m-ascending basis.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub zero: LinearOperator,
    pub plus: LinearOperator,
    pub minus: LinearOperator,
}

impl SpinOps {
    /// `J_x = (J₊ + J₋)/2`.
    pub fn x(&self) -> LinearOperator {
        LinearOperator::hermitian(
            self.zero.space().clone(),
            (self.plus.matrix() + self.minus.matrix()) * Complex64::new(0.5, 0.0),
        )
        .expect("J_x is Hermitian")
    }

    /// `J_y = (J₊ − J₋)/(2i)`.
    pub fn y(&self) -> LinearOperator {
        LinearOperator::hermitian(
            self.zero.space().clone(),
            (self.plus.matrix() - self.minus.matrix()) * Complex64::new(0.0, -0.5),
        )
        .expect("J_y is Hermitian")
    }

    /// `J² = J₀² + (J₊J₋ + J₋J₊)/2`.
    pub fn casimir(&self) -> LinearOperator {
        let z = self.zero.matrix();
        let (p, m) = (self.plus.matrix(), self.minus.matrix());
        let c = z * z + (p * m + m * p) * Complex64::new(0.5, 0.0);
        LinearOperator::new(self.zero.space().clone(), c).expect("same shape")
    }
}

pub fn spin_ops(j: SpinJ) -> SpinOps {
    let d = j.dim();
    let two_j = j.twice() as i64;
    // index i ↔ m = −j + i; J₊|m⟩ = √((j − m)(j + m + 1)) |m + 1⟩
    let plus = DMatrix::from_fn(d, d, |r, c| {
        if r == c + 1 {
            let k = c as i64;
            Complex64::new((((two_j - k) * (k + 1)) as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let zero = DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::new(r as f64 - j.value(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let space = SpaceDescriptor::spin(j);
    let minus = plus.adjoint();
    SpinOps {
        zero: LinearOperator::hermitian(space.clone(), zero).expect("diagonal real"),
        plus: LinearOperator::new(space.clone(), plus).expect("shape"),
        minus: LinearOperator::new(space, minus).expect("shape"),
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `|j, m⟩` obtained by raising the lowest-weight state:
/// `C(2j, j+m)^{−1/2} (J₊)^{j+m}/(j+m)! |j,−j⟩`.
pub fn basis_state(j: SpinJ, two_m: i32) -> Result<StateVector> {
    let two_j = j.twice() as i32;
    if two_m < -two_j || two_m > two_j || (two_j - two_m) % 2 != 0 {
        return Err(Error::InvalidWeight {
            two_j: j.twice(),
            two_m,
        });
    }
    let steps = ((two_j + two_m) / 2) as u32;
    let ops = spin_ops(j);
    let space = SpaceDescriptor::spin(j);
    let mut v = StateVector::basis(space.clone(), 0)?.amps().clone();
    for k in 1..=steps {
        v = ops.plus.matrix() * v / Complex64::new(k as f64, 0.0);
    }
    let scale = binomial(j.twice(), steps).sqrt().recip();
    StateVector::new(space, v * Complex64::new(scale, 0.0))
}

/// A point of the sphere, given either by the projective coordinate `ζ` or by
/// the polar angles `(θ, φ)`. The antipode `θ = π` only has the angle form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinPoint {
    Zeta(Complex64),
    Angles { theta: f64, phi: f64 },
}

impl SpinPoint {
    /// `(θ, φ)` with `ζ = −tan(θ/2) e^{−iφ}`, `φ ∈ [0, 2π)`.
    pub fn angles(&self) -> (f64, f64) {
        match *self {
            SpinPoint::Angles { theta, phi } => (theta, phi.rem_euclid(std::f64::consts::TAU)),
            SpinPoint::Zeta(z) => zeta_to_angles(z),
        }
    }

    /// `ζ`, or `None` at the antipode.
    pub fn zeta(&self) -> Option<Complex64> {
        match *self {
            SpinPoint::Zeta(z) => Some(z),
            SpinPoint::Angles { theta, phi } => angle_to_zeta(theta, phi).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCsParams {
    pub j: SpinJ,
    pub point: SpinPoint,
}

/// `ζ = −tan(θ/2) e^{−iφ}`.
pub fn angle_to_zeta(theta: f64, phi: f64) -> Result<Complex64> {
    use std::f64::consts::PI;
    if !theta.is_finite() || !phi.is_finite() || !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside [0, pi]"
        )));
    }
    if theta == PI {
        return Err(Error::AntipodalPoint);
    }
    Ok(-Complex64::from_polar((theta / 2.0).tan(), -phi))
}

/// Inverse of [`angle_to_zeta`], `φ` reduced to `[0, 2π)`.
pub fn zeta_to_angles(zeta: Complex64) -> (f64, f64) {
    let theta = 2.0 * zeta.norm().atan();
    let phi = if zeta.norm() == 0.0 {
        0.0
    } else {
        (-(-zeta).arg()).rem_euclid(std::f64::consts::TAU)
    };
    (theta, phi)
}

/// `ζ = (ξ/|ξ|) tan|ξ|` relating the coset exponential to the closed form.
pub fn xi_to_point(xi: Complex64) -> SpinPoint {
    let r = xi.norm();
    if r == 0.0 {
        return SpinPoint::Zeta(Complex64::new(0.0, 0.0));
    }
    // ξ = −(θ/2) e^{−iφ}
    let theta = 2.0 * r;
    let phi = (-(-xi).arg()).rem_euclid(std::f64::consts::TAU);
    if theta < std::f64::consts::PI {
        SpinPoint::Zeta(xi / r * r.tan())
    } else {
        SpinPoint::Angles { theta, phi }
    }
}

/// Amplitudes `√C(2j,k) cos(θ/2)^{2j−k} (−sin(θ/2) e^{−iφ})^k`.
fn cs_from_angles(j: SpinJ, theta: f64, phi: f64) -> Result<StateVector> {
    let n = j.twice();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let w = -Complex64::from_polar(s, -phi);
    let amps = DVector::from_fn(j.dim(), |k, _| {
        w.powi(k as i32) * c.powi((n - k as u32) as i32) * binomial(n, k as u32).sqrt()
    });
    StateVector::new(SpaceDescriptor::spin(j), amps)
}

/// `(1 + |ζ|²)^{−j} exp(ζJ₊)|j,−j⟩`, or the angle form when given angles.
pub fn spin_cs(params: SpinCsParams) -> Result<StateVector> {
    match params.point {
        SpinPoint::Zeta(z) => {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidParameter("zeta must be finite".into()));
            }
            LowestWeightModel::su2(params.j)?.coherent_state(z)
        }
        SpinPoint::Angles { theta, phi } => {
            if !theta.is_finite() || !phi.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
                return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, pi]")));
            }
            cs_from_angles(params.j, theta, phi)
        }
    }
}

pub fn spin_cs_zeta(j: SpinJ, zeta: Complex64) -> Result<StateVector> {
    spin_cs(SpinCsParams {
        j,
        point: SpinPoint::Zeta(zeta),
    })
}

/// `exp(ξJ₊ − ξ*J₋)|j,−j⟩` through the matrix exponential.
pub fn spin_cs_exp(j: SpinJ, xi: Complex64) -> Result<StateVector> {
    let ops = spin_ops(j);
    let generator = ops.plus.scale(xi).sub(&ops.minus.scale(xi.conj()))?;
    let omega = mat_exp(&generator)?;
    omega.apply_normalized(&StateVector::basis(SpaceDescriptor::spin(j), 0)?)
}

fn spin_factor(s: &StateVector) -> Result<SpinJ> {
    match s.space().single() {
        Some(Factor::Spin { two_j }) => Ok(SpinJ::from_twice(two_j)),
        _ => Err(Error::SpaceMismatch {
            expected: "single spin factor".into(),
            found: s.space().to_string(),
        }),
    }
}

/// Embedding of spin `j_B + j_C` into `j_B ⊗ j_C` built by raising the
/// product of lowest-weight states with `J_B₊ ⊗ I + I ⊗ J_C₊`.
pub fn addition_isometry(jb: SpinJ, jc: SpinJ) -> Result<SplitIsometry> {
    if jb.twice() == 0 || jc.twice() == 0 {
        return Err(Error::InvalidParameter(
            "subsystem spins must be at least 1/2".into(),
        ));
    }
    let ja = SpinJ::from_twice(jb.twice() + jc.twice());
    let (ob, oc) = (spin_ops(jb), spin_ops(jc));
    let total_plus = ob
        .plus
        .kron(&LinearOperator::identity(SpaceDescriptor::spin(jc)))
        .add(&LinearOperator::identity(SpaceDescriptor::spin(jb)).kron(&oc.plus))?;

    let output = SpaceDescriptor::spin(jb).tensor(&SpaceDescriptor::spin(jc));
    let mut w = DMatrix::zeros(output.dim(), ja.dim());
    let mut col = DVector::zeros(output.dim());
    col[0] = Complex64::new(1.0, 0.0);
    w.set_column(0, &col);
    let two_ja = ja.twice() as u64;
    for k in 0..two_ja {
        // ‖J_A₊|j_A, m⟩‖ with m = −j_A + k
        let norm = (((two_ja - k) * (k + 1)) as f64).sqrt();
        col = total_plus.matrix() * &col / Complex64::new(norm, 0.0);
        w.set_column(k as usize + 1, &col);
    }
    Ok(SplitIsometry {
        input: SpaceDescriptor::spin(ja),
        output,
        matrix: w,
    })
}

/// Splits a spin-`j_A` state into `j_B ⊗ j_C`; requires `j_A = j_B + j_C`.
pub fn split_spin(s: &StateVector, jb: SpinJ, jc: SpinJ) -> Result<StateVector> {
    let ja = spin_factor(s)?;
    if ja.twice() != jb.twice() + jc.twice() {
        return Err(Error::WeightConditionViolated {
            two_ja: ja.twice(),
            two_jbc: jb.twice() + jc.twice(),
        });
    }
    addition_isometry(jb, jc)?.apply(s)
}
