//! Fixed-point binary reals with a few hundred bits of precision.
//!
//! Only what the constants table needs: field operations, natural logarithm
//! of positive values, and decimal conversion. Values are `mant / 2^FRAC_BITS`
//! with truncating arithmetic; every operation loses at most a couple of
//! units in the last place, far below the 50 decimal digits reported.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fractional bits carried by every [`HpReal`] (~96 decimal digits).
pub const FRAC_BITS: u32 = 320;

/// Decimal expansion of pi, 64 digits after the point.
pub const PI_DIGITS: &str = "3.1415926535897932384626433832795028841971693993751058209749445923";
/// Decimal expansion of the Euler-Mascheroni constant, 64 digits after the point.
pub const EULER_GAMMA_DIGITS: &str =
    "0.5772156649015328606065120900824024310421593359399235988057672348";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HpReal {
    mant: BigInt,
}

impl HpReal {
    pub fn zero() -> Self {
        HpReal { mant: BigInt::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        HpReal {
            mant: BigInt::from(n) << FRAC_BITS,
        }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        HpReal {
            mant: (num << FRAC_BITS).div_floor(den),
        }
    }

    pub fn from_ratio_i64(num: i64, den: i64) -> Self {
        Self::from_ratio(&BigInt::from(num), &BigInt::from(den))
    }

    /// Parses a plain decimal literal such as `-12.5`.
    pub fn parse_decimal(s: &str) -> Option<Self> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num = BigInt::parse_bytes(digits.as_bytes(), 10)?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let v = Self::from_ratio(&num, &den);
        Some(if neg { -v } else { v })
    }

    pub fn pi() -> Self {
        static PI: OnceLock<HpReal> = OnceLock::new();
        PI.get_or_init(|| Self::parse_decimal(PI_DIGITS).expect("valid literal"))
            .clone()
    }

    pub fn euler_gamma() -> Self {
        static G: OnceLock<HpReal> = OnceLock::new();
        G.get_or_init(|| Self::parse_decimal(EULER_GAMMA_DIGITS).expect("valid literal"))
            .clone()
    }

    pub fn ln2() -> Self {
        static LN2: OnceLock<HpReal> = OnceLock::new();
        LN2.get_or_init(|| {
            // ln 2 = 2 atanh(1/3)
            atanh_ratio(&BigInt::one(), &BigInt::from(3)).mul_int(2)
        })
        .clone()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        HpReal {
            mant: self.mant.abs(),
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        HpReal {
            mant: &self.mant * k,
        }
    }

    pub fn div_int(&self, k: i64) -> Self {
        HpReal {
            mant: self.mant.div_floor(&BigInt::from(k)),
        }
    }

    pub fn div(&self, other: &HpReal) -> Self {
        assert!(!other.mant.is_zero(), "division by zero");
        HpReal {
            mant: (&self.mant << FRAC_BITS).div_floor(&other.mant),
        }
    }

    /// Natural logarithm of a positive rational `num / den`.
    pub fn ln_ratio(num: &BigInt, den: &BigInt) -> Self {
        assert!(
            num.sign() == Sign::Plus && den.sign() == Sign::Plus,
            "logarithm of a non-positive value"
        );
        // num/den = 2^k * y with y in [1/2, 2)
        let k = num.bits() as i64 - den.bits() as i64;
        let (n, d) = if k >= 0 {
            (num.clone(), den << (k as u64))
        } else {
            (num << ((-k) as u64), den.clone())
        };
        // ln y = 2 atanh((y-1)/(y+1)) = 2 atanh((n-d)/(n+d)), |arg| <= 1/3
        let series = atanh_ratio(&(&n - &d), &(&n + &d)).mul_int(2);
        series + Self::ln2().mul_int(k)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(&self) -> Self {
        Self::ln_ratio(&self.mant, &(BigInt::one() << FRAC_BITS))
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 significant bits then scale.
        let bits = self.mant.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.mant >> shift as u64).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi((shift - FRAC_BITS as i64) as i32)
    }

    /// Decimal rendering truncated (toward negative infinity) to `digits`
    /// places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = (&self.mant * &scale).div_floor(&(BigInt::one() << FRAC_BITS));
        let neg = scaled.is_negative();
        let (int_part, frac_part) = scaled.abs().div_rem(&scale);
        let frac = frac_part.to_string();
        let pad = "0".repeat(digits.saturating_sub(frac.len()));
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{pad}{frac}")
        }
    }

    /// `|self - other| <= 10^-digits`.
    pub fn agrees_to(&self, other: &HpReal, digits: u32) -> bool {
        let diff = (self.clone() - other.clone()).abs();
        let tol = HpReal::from_ratio(&BigInt::one(), &BigInt::from(10u32).pow(digits));
        diff <= tol
    }
}

/// atanh(p/q) for |p/q| <= 1/3 by its Taylor series.
fn atanh_ratio(p: &BigInt, q: &BigInt) -> HpReal {
    let one = BigInt::one() << FRAC_BITS;
    // term_j = (p/q)^(2j+1) in fixed point
    let mut power = (p * &one).div_floor(q);
    let q2 = q * q;
    let p2 = p * p;
    let mut acc = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        acc += &power / BigInt::from(2 * j + 1);
        power = (&power * &p2) / &q2;
        j += 1;
    }
    HpReal { mant: acc }
}

impl Add for HpReal {
    type Output = HpReal;
    fn add(self, rhs: HpReal) -> HpReal {
        HpReal {
            mant: self.mant + rhs.mant,
        }
    }
}

impl Sub for HpReal {
    type Output = HpReal;
    fn sub(self, rhs: HpReal) -> HpReal {
        HpReal {
            mant: self.mant - rhs.mant,
        }
    }
}

impl Mul for HpReal {
    type Output = HpReal;
    fn mul(self, rhs: HpReal) -> HpReal {
        HpReal {
            mant: (self.mant * rhs.mant) >> FRAC_BITS,
        }
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal { mant: -self.mant }
    }
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HpReal({})", self.to_decimal(30))
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(50)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ln 2 = sum_{k>=1} 1 / (k 2^k), a different series from the atanh one.
    fn ln2_reference() -> HpReal {
        let mut acc = HpReal::zero();
        for k in 1..400i64 {
            let den = BigInt::from(k) << (k as u64);
            acc = acc + HpReal::from_ratio(&BigInt::one(), &den);
        }
        acc
    }

    #[test]
    fn ln2_matches_independent_series() {
        assert!(HpReal::ln2().agrees_to(&ln2_reference(), 80));
        assert_eq!(
            &HpReal::ln2().to_decimal(30),
            "0.693147180559945309417232121458"
        );
    }

    #[test]
    fn ln_of_rationals() {
        let third = HpReal::ln_ratio(&BigInt::from(1), &BigInt::from(3));
        assert!((third.to_f64() - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        let big = HpReal::ln_ratio(&BigInt::from(10u64.pow(12)), &BigInt::from(7));
        assert!((big.to_f64() - (1e12f64 / 7.0).ln()).abs() < 1e-12);
        // ln(a b) = ln a + ln b
        let a = HpReal::ln_ratio(&BigInt::from(5), &BigInt::from(9));
        let b = HpReal::ln_ratio(&BigInt::from(27), &BigInt::from(11));
        let ab = HpReal::ln_ratio(&BigInt::from(15), &BigInt::from(11));
        assert!((a + b).agrees_to(&ab, 85));
    }

    #[test]
    fn decimal_round_trip() {
        let pi = HpReal::pi();
        assert_eq!(pi.to_decimal(20), "3.14159265358979323846");
        assert_eq!(HpReal::from_ratio_i64(-1, 4).to_decimal(3), "-0.250");
        assert_eq!(HpReal::parse_decimal("-0.25").unwrap().to_f64(), -0.25);
        assert!(HpReal::parse_decimal("1.2.3").is_none());
    }

    #[test]
    fn ln_of_pi_is_consistent_with_f64() {
        assert!((HpReal::pi().ln().to_f64() - std::f64::consts::PI.ln()).abs() < 1e-15);
    }
}
