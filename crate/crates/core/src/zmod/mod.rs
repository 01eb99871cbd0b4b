//! Exact algebra of 2x2 matrices over `Z_m`: determinant classes `G_D`,
//! the row/column set `V` and the entry measure `nu`.

mod audit;
mod group;
mod matrix;

pub use audit::{generator_cover, marginal_audit, GeneratorCover, MarginalAudit, COVER_CAP};
pub use group::{
    enumerate_det_class, enumerate_det_class_with_cap, nu_table, DetClass, Group, NuTable, VSet,
    ENUMERATION_CAP,
};
pub use matrix::ModMatrix;

use serde::Serialize;

use crate::arith::{euler_phi, gcd, prime_factors};
use crate::error::{Error, Result};

/// A modulus `m >= 2` with its factorisation data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Modulus {
    m: u32,
    prime_factors: Vec<u32>,
    m_prime: u32,
    phi_m_prime: u32,
}

impl Modulus {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 || m > u32::MAX as u64 / 2 {
            return Err(Error::InvalidModulus(m));
        }
        let primes: Vec<u32> = prime_factors(m).into_iter().map(|p| p as u32).collect();
        let m_prime = primes.iter().product::<u32>();
        Ok(Modulus {
            m: m as u32,
            phi_m_prime: euler_phi(m_prime as u64) as u32,
            prime_factors: primes,
            m_prime,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn prime_factors(&self) -> &[u32] {
        &self.prime_factors
    }

    /// Squarefree kernel `m'`.
    pub fn m_prime(&self) -> u32 {
        self.m_prime
    }

    pub fn phi_m_prime(&self) -> u32 {
        self.phi_m_prime
    }

    pub fn is_unit(&self, a: u32) -> bool {
        gcd(a as u64, self.m as u64) == 1
    }

    pub fn units(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.m).filter(|&a| self.is_unit(a))
    }

    /// `-1` as a residue.
    pub fn minus_one(&self) -> u32 {
        self.m - 1
    }

    /// `|V| = m^2 prod (1 - 1/p^2)`.
    pub fn v_size(&self) -> u64 {
        let m = self.m as u64;
        self.prime_factors
            .iter()
            .fold(m * m, |acc, &p| acc / (p as u64 * p as u64) * (p as u64 * p as u64 - 1))
    }

    /// `|G_D| = m |V|` for any unit `D`.
    pub fn det_class_size(&self) -> u64 {
        self.m as u64 * self.v_size()
    }

    /// `|G|` where `G = G_1 ∪ G_{-1}`; the two classes coincide for `m = 2`.
    pub fn group_size(&self) -> u64 {
        if self.m == 2 {
            self.det_class_size()
        } else {
            2 * self.det_class_size()
        }
    }

    /// Every listed prime divides `m`, and their product is `m'`.
    pub fn check_invariants(&self) -> bool {
        self.prime_factors.iter().all(|p| self.m.is_multiple_of(*p))
            && self.m.is_multiple_of(self.m_prime)
            && self.prime_factors.iter().product::<u32>() == self.m_prime
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_data() {
        let m = Modulus::new(12).unwrap();
        assert_eq!(m.prime_factors(), &[2, 3]);
        assert_eq!(m.m_prime(), 6);
        assert_eq!(m.phi_m_prime(), 2);
        assert_eq!(m.v_size(), 96);
        assert_eq!(m.det_class_size(), 1152);
        assert!(m.check_invariants());
        assert_eq!(Modulus::new(2).unwrap().group_size(), 6);
        assert_eq!(Modulus::new(3).unwrap().group_size(), 48);
        assert!(Modulus::new(1).is_err());
    }
}
