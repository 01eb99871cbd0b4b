use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};

/// The closed interval `[num / 2^bits, (num + 1) / 2^bits]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicInterval {
    numerator: BigUint,
    bits: u32,
}

impl DyadicInterval {
    pub fn new(numerator: BigUint, bits: u32) -> Result<Self> {
        if numerator.bits() > bits as u64 {
            return Err(Error::InvalidParameter(format!(
                "numerator needs {} bits, interval has {bits}",
                numerator.bits()
            )));
        }
        Ok(DyadicInterval { numerator, bits })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> Self {
        DyadicInterval {
            numerator: rng.gen_biguint(bits as u64),
            bits,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.bits
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.numerator.clone().into(), self.denominator().into())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new((&self.numerator + 1u32).into(), self.denominator().into())
    }

    /// Appends `extra` random low bits, selecting a uniformly random
    /// sub-interval.
    pub fn refine<R: Rng + ?Sized>(&mut self, rng: &mut R, extra: u32) {
        let low = rng.gen_biguint(extra as u64);
        self.numerator = (&self.numerator << extra) | low;
        self.bits += extra;
    }

    /// Left endpoint as a float (exact to double precision).
    pub fn lo_f64(&self) -> f64 {
        let keep = 64.min(self.bits);
        let top = (&self.numerator >> (self.bits - keep)).to_u64().unwrap_or(0);
        top as f64 / 2f64.powi(keep as i32)
    }

    /// The left endpoint truncated to 64 fractional bits.
    pub fn top_u64(&self) -> u64 {
        if self.bits >= 64 {
            (&self.numerator >> (self.bits - 64)).to_u64().unwrap_or(0)
        } else {
            self.numerator.to_u64().unwrap_or(0) << (64 - self.bits)
        }
    }
}
