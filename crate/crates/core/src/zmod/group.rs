use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ModMatrix, Modulus};
use crate::arith::{gcd, solve_linear_congruence};
use crate::error::{Error, Result};

/// Largest modulus enumerated exhaustively unless the caller raises the cap.
pub const ENUMERATION_CAP: u32 = 64;

/// All matrices over `Z_m` with a fixed unit determinant.
#[derive(Debug, Clone)]
pub struct DetClass {
    modulus: Modulus,
    d: u32,
    elements: Vec<ModMatrix>,
}

impl DetClass {
    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn det(&self) -> u32 {
        self.d
    }

    pub fn elements(&self) -> &[ModMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[cfg(test)]
impl DetClass {
    pub(crate) fn truncated_for_test(cls: &mut DetClass) -> DetClass {
        let mut c = cls.clone();
        c.elements.pop();
        c
    }
}

pub fn enumerate_det_class(modulus: &Modulus, d: u32) -> Result<DetClass> {
    enumerate_det_class_with_cap(modulus, d, ENUMERATION_CAP)
}

/// Loops over `(a, b, c)` and solves `a x ≡ D + b c (mod m)` for the last
/// entry. Output is sorted by `(a, b, c, d)` and duplicate-free by
/// construction.
pub fn enumerate_det_class_with_cap(modulus: &Modulus, d: u32, cap: u32) -> Result<DetClass> {
    let m = modulus.m();
    if m > cap {
        return Err(Error::ModulusTooLarge { m, cap });
    }
    let d = d % m;
    if !modulus.is_unit(d) {
        return Err(Error::DetNotCoprime { d, m });
    }
    let mm = m as u64;
    let mut elements = Vec::with_capacity(modulus.det_class_size() as usize);
    for a in 0..mm {
        for b in 0..mm {
            for c in 0..mm {
                let rhs = (d as u64 + b * c) % mm;
                for x in solve_linear_congruence(a, rhs, mm) {
                    elements.push(ModMatrix::new(m, a, b, c, x));
                }
            }
        }
    }
    Ok(DetClass {
        modulus: modulus.clone(),
        d,
        elements,
    })
}

/// `G = G_1 ∪ G_{-1}` with a dense index. `G_1` occupies indices
/// `0..g1_len()`; for `m > 2` the class `G_{-1}` follows.
#[derive(Debug, Clone)]
pub struct Group {
    modulus: Modulus,
    elements: Vec<ModMatrix>,
    g1_len: usize,
    index: Vec<u32>,
}

impl Group {
    pub fn new(modulus: &Modulus) -> Result<Self> {
        let g1 = enumerate_det_class(modulus, 1)?;
        let mut elements = g1.elements;
        let g1_len = elements.len();
        if modulus.m() > 2 {
            elements.extend(enumerate_det_class(modulus, modulus.minus_one())?.elements);
        }
        let m = modulus.m() as usize;
        let mut index = vec![u32::MAX; m * m * m * m];
        for (i, g) in elements.iter().enumerate() {
            index[g.code()] = i as u32;
        }
        Ok(Group {
            modulus: modulus.clone(),
            elements,
            g1_len,
            index,
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn elements(&self) -> &[ModMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn g1_len(&self) -> usize {
        self.g1_len
    }

    /// Index range of the class `G_{(-1)^parity}` (parity 0 is `G_1`).
    pub fn class_range(&self, parity: usize) -> std::ops::Range<usize> {
        if parity.is_multiple_of(2) || self.modulus.m() == 2 {
            0..self.g1_len
        } else {
            self.g1_len..self.elements.len()
        }
    }

    /// Which class an element belongs to: 0 for `G_1`, 1 for `G_{-1}`
    /// (always 0 when the classes coincide).
    pub fn class_of(&self, i: usize) -> usize {
        usize::from(i >= self.g1_len)
    }

    pub fn index_of(&self, g: &ModMatrix) -> Option<usize> {
        if g.modulus() != self.modulus.m() {
            return None;
        }
        match self.index[g.code()] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub fn get(&self, i: usize) -> ModMatrix {
        self.elements[i]
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&ModMatrix::identity(self.modulus.m()))
            .expect("identity lies in G_1")
    }

    /// `table[i][rho]` is the index of `g_i h(rho)`.
    pub fn h_table(&self) -> Vec<Vec<u32>> {
        let m = self.modulus.m();
        self.elements
            .iter()
            .map(|g| {
                (0..m)
                    .map(|rho| self.index_of(&g.mul_h(rho)).expect("G is closed under h") as u32)
                    .collect()
            })
            .collect()
    }
}

/// The entry measure `nu_a = prod_{p | gcd(a,m)} (1 - 1/p) / (m prod_{p | m} (1 - 1/p^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuTable {
    m: u32,
    weights: Vec<BigRational>,
}

impl NuTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn weight(&self, a: u32) -> &BigRational {
        &self.weights[(a % self.m) as usize]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.weights.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn total(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, w| acc + w)
    }
}

pub fn nu_table(modulus: &Modulus) -> NuTable {
    let m = modulus.m();
    let ratio = |n: u64, d: u64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let denom = modulus
        .prime_factors()
        .iter()
        .fold(ratio(m as u64, 1), |acc, &p| {
            let p = p as u64;
            acc * ratio(p * p - 1, p * p)
        });
    let weights = (0..m)
        .map(|a| {
            let g = gcd(a as u64, m as u64);
            let num = modulus
                .prime_factors()
                .iter()
                .filter(|&&p| g.is_multiple_of(p as u64))
                .fold(BigRational::one(), |acc, &p| acc * ratio(p as u64 - 1, p as u64));
            num / &denom
        })
        .collect();
    NuTable { m, weights }
}

/// Pairs `(a, b)` in `Z_m^2` with `gcd(a, b, m) = 1`.
#[derive(Debug, Clone)]
pub struct VSet {
    m: u32,
    pairs: Vec<(u32, u32)>,
}

impl VSet {
    pub fn new(modulus: &Modulus) -> Self {
        let m = modulus.m();
        let pairs = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|&(a, b)| gcd(gcd(a as u64, b as u64), m as u64) == 1)
            .collect();
        VSet { m, pairs }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        gcd(gcd(a as u64, b as u64), self.m as u64) == 1
    }
}
