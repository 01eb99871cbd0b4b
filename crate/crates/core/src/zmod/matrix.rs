use std::fmt;

use serde::Serialize;

use crate::arith::mod_inverse;
use crate::error::{Error, Result};

/// `[[a, b], [c, d]]` over `Z_m` with its determinant cached.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModMatrix {
    m: u32,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
    det: u32,
}

impl ModMatrix {
    pub fn new(m: u32, a: u64, b: u64, c: u64, d: u64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        let mm = m as u64;
        let (a, b, c, d) = ((a % mm) as u32, (b % mm) as u32, (c % mm) as u32, (d % mm) as u32);
        Self::from_reduced(m, a, b, c, d)
    }

    fn from_reduced(m: u32, a: u32, b: u32, c: u32, d: u32) -> Self {
        let mm = m as u64;
        let ad = a as u64 * d as u64 % mm;
        let bc = b as u64 * c as u64 % mm;
        let det = ((ad + mm - bc) % mm) as u32;
        ModMatrix { m, a, b, c, d, det }
    }

    pub fn identity(m: u32) -> Self {
        Self::new(m, 1, 0, 0, 1)
    }

    /// `h(b) = [[0, 1], [1, b]]`, the one-step convergent matrix.
    pub fn h(b: u64, m: u32) -> Self {
        Self::new(m, 0, 1, 1, b)
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> u32 {
        self.det
    }

    /// Dense code `a + m b + m^2 c + m^3 d` for lookup tables.
    pub fn code(&self) -> usize {
        let m = self.m as usize;
        self.a as usize + m * (self.b as usize + m * (self.c as usize + m * self.d as usize))
    }

    pub fn mat_mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.m != other.m {
            return Err(Error::ModulusMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Ok(self.mul(other))
    }

    /// Product for operands already known to share a modulus.
    pub fn mul(&self, o: &ModMatrix) -> ModMatrix {
        debug_assert_eq!(self.m, o.m);
        let m = self.m as u64;
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        let (e, f, g, h) = (o.a as u64, o.b as u64, o.c as u64, o.d as u64);
        let na = ((a * e + b * g) % m) as u32;
        let nb = ((a * f + b * h) % m) as u32;
        let nc = ((c * e + d * g) % m) as u32;
        let nd = ((c * f + d * h) % m) as u32;
        let det = (self.det as u64 * o.det as u64 % m) as u32;
        ModMatrix {
            m: self.m,
            a: na,
            b: nb,
            c: nc,
            d: nd,
            det,
        }
    }

    /// Right multiplication by `h(b)`: `[[a, b], [c, d]] h(x) = [[b, a + x b], [d, c + x d]]`.
    pub fn mul_h(&self, x: u32) -> ModMatrix {
        let m = self.m as u64;
        let nb = ((self.a as u64 + x as u64 * self.b as u64) % m) as u32;
        let nd = ((self.c as u64 + x as u64 * self.d as u64) % m) as u32;
        let det = if self.det == 0 { 0 } else { self.m - self.det };
        ModMatrix {
            m: self.m,
            a: self.b,
            b: nb,
            c: self.d,
            d: nd,
            det,
        }
    }

    /// `det^{-1} adj(x)`.
    pub fn inverse(&self) -> Result<ModMatrix> {
        let inv = mod_inverse(self.det as u64, self.m as u64).ok_or(Error::NotInvertible {
            det: self.det,
            m: self.m,
        })?;
        let m = self.m as u64;
        let neg = |x: u32| (m - x as u64) % m;
        Ok(ModMatrix::new(
            self.m,
            inv * self.d as u64,
            inv * neg(self.b),
            inv * neg(self.c),
            inv * self.a as u64,
        ))
    }

    pub fn transpose(&self) -> ModMatrix {
        Self::from_reduced(self.m, self.a, self.c, self.b, self.d)
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.a, self.b, self.c, self.d, self.m
        )
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}
