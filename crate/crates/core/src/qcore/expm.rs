//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13.
//!
//! The degree is the smallest one whose 1-norm threshold covers the input;
//! otherwise the matrix is scaled by `2^-s` into the degree-13 region and the
//! approximant is squared `s` times. The thresholds bound the backward error
//! by the unit roundoff of IEEE doubles.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::LinearOperator;
use crate::error::{Error, Result};

const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
    (13, 5.371_920_351_148_152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `exp(op)` on the operator's space.
pub fn mat_exp(op: &LinearOperator) -> Result<LinearOperator> {
    let m = expm(op.matrix())?;
    LinearOperator::new(op.space().clone(), m)
}

/// Dense complex matrix exponential.
pub fn expm(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    assert!(a.is_square(), "expm needs a square matrix");
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if n == 1 {
        return Ok(DMatrix::from_element(1, 1, a[(0, 0)].exp()));
    }

    let norm = one_norm(a);
    for &(degree, theta) in &THETA[..4] {
        if norm <= theta {
            return pade(a, degree);
        }
    }

    let theta13 = THETA[4].1;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * Complex64::new(2f64.powi(-s), 0.0);
    let mut r = pade(&scaled, 13)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(r)
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade(a: &DMatrix<Complex64>, degree: usize) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let c = |x: f64| Complex64::new(x, 0.0);

    let (u, v) = if degree == 13 {
        let b = &B13;
        let a2 = a * a;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
        let u = a * (&a6 * inner_u
            + &a6 * c(b[7])
            + &a4 * c(b[5])
            + &a2 * c(b[3])
            + &id * c(b[1]));
        let inner_v = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
        let v = &a6 * inner_v + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &id * c(b[0]);
        (u, v)
    } else {
        let b: &[f64] = match degree {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            9 => &B9,
            _ => unreachable!("unsupported Padé degree {degree}"),
        };
        let a2 = a * a;
        // powers[k] = A^(2k)
        let mut powers = vec![id.clone()];
        for k in 1..=degree / 2 {
            let next = &powers[k - 1] * &a2;
            powers.push(next);
        }
        let mut u_even = DMatrix::<Complex64>::zeros(n, n);
        let mut v = DMatrix::<Complex64>::zeros(n, n);
        for (k, p) in powers.iter().enumerate() {
            v += p * c(b[2 * k]);
            u_even += p * c(b[2 * k + 1]);
        }
        (a * u_even, v)
    };

    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).ok_or(Error::NonFinite)
}
