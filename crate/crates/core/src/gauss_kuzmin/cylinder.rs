use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp::HpReal;

/// The set of `alpha` whose leading partial quotients are `b_1..b_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    quotients: Vec<u64>,
}

/// `(p_{k-1}, p_k, q_{k-1}, q_k)`.
pub type Continuants = (BigUint, BigUint, BigUint, BigUint);

impl Cylinder {
    pub fn new(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() || quotients.contains(&0) {
            return Err(Error::InvalidParameter(
                "a cylinder needs a nonempty list of positive quotients".into(),
            ));
        }
        Ok(Cylinder { quotients })
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn continuants(&self) -> Continuants {
        let (mut pp, mut p, mut qp, mut q) =
            (BigUint::one(), BigUint::from(0u32), BigUint::from(0u32), BigUint::one());
        for &b in &self.quotients {
            let np = &p * b + &pp;
            let nq = &q * b + &qp;
            pp = std::mem::replace(&mut p, np);
            qp = std::mem::replace(&mut q, nq);
        }
        (pp, p, qp, q)
    }

    /// Endpoints `p_k / q_k` and `(p_k + p_{k-1}) / (q_k + q_{k-1})`, ascending.
    pub fn endpoints(&self) -> (BigRational, BigRational) {
        let (pp, p, qp, q) = self.continuants();
        let a = BigRational::new(BigInt::from(p.clone()), BigInt::from(q.clone()));
        let b = BigRational::new(BigInt::from(p + pp), BigInt::from(q + qp));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Exact Lebesgue measure `1 / (q_k (q_k + q_{k-1}))`.
pub fn cylinder_lambda(cyl: &Cylinder) -> BigRational {
    let (_, _, qp, q) = cyl.continuants();
    let den = &q * (&q + &qp);
    BigRational::new(BigInt::one(), BigInt::from(den))
}

/// A closed bracket `[lower, upper]` around a measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderBound {
    pub lower: f64,
    pub upper: f64,
}

impl CylinderBound {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Gauss measure `|log2((1 + hi) / (1 + lo))|` of a cylinder.
///
/// The ratio equals `1 + (-1)^{k+1} / (q_k (q_k + q_{k-1} + p_k + p_{k-1}))`;
/// its logarithm is evaluated in fixed point with about 96 digits and the
/// result widened outward to the neighbouring doubles.
pub fn cylinder_gauss(cyl: &Cylinder) -> CylinderBound {
    let (pp, p, qp, q) = cyl.continuants();
    let den = BigInt::from(&q * (&q + &qp + &p + &pp));
    let k = cyl.quotients().len();
    let num = if k.is_multiple_of(2) { &den - 1 } else { &den + 1 };
    let ln = HpReal::ln_ratio(&num, &den).abs();
    let v = ln.div(&HpReal::ln2()).to_f64();
    CylinderBound {
        lower: v.next_down().max(0.0),
        upper: v.next_up(),
    }
}

/// Gauss measure from `u128` continuants in floating point with a relative
/// error margin; used by the bulk enumerators. Values are in units of
/// `2^-64`, rounded outward.
pub(crate) fn gauss_units(k: usize, p: u128, pp: u128, q: u128, qp: u128) -> (u128, u128) {
    let den = q as f64 * (q + qp + p + pp) as f64;
    let delta = if k.is_multiple_of(2) { -1.0 / den } else { 1.0 / den };
    let v = delta.ln_1p().abs() / std::f64::consts::LN_2;
    to_units(v)
}

/// Lebesgue measure `1 / (q (q + q'))` in units of `2^-64`, rounded outward.
pub(crate) fn lambda_units(q: u128, qp: u128) -> (u128, u128) {
    let den = q * (q + qp);
    let scaled = 1u128 << 64;
    let lo = scaled / den;
    let hi = if scaled.is_multiple_of(den) { lo } else { lo + 1 };
    (lo, hi)
}

const UNIT: f64 = 18_446_744_073_709_551_616.0;

/// Outward rounding of a value carrying a relative error below `2^-48`.
fn to_units(v: f64) -> (u128, u128) {
    let scaled = v * UNIT;
    let slack = scaled * 2f64.powi(-48) + 1.0;
    let lo = (scaled - slack).floor().max(0.0) as u128;
    let hi = (scaled + slack).ceil() as u128;
    (lo, hi)
}

pub(crate) fn units_to_f64(u: u128) -> f64 {
    u as f64 / UNIT
}
