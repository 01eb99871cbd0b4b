use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational `l/m` in lowest terms with `0 < l < m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalR {
    l: u32,
    m: u32,
}

impl RationalR {
    pub fn new(l: u64, m: u64) -> Result<Self> {
        if l == 0 || l >= m {
            return Err(Error::InvalidParameter(format!("r = {l}/{m} is not in (0, 1)")));
        }
        let g = l.gcd(&m);
        let (l, m) = (l / g, m / g);
        let m32 = u32::try_from(m).map_err(|_| Error::InvalidParameter(format!("denominator {m} too large")))?;
        Ok(RationalR { l: l as u32, m: m32 })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.l.into(), self.m.into())
    }

    pub fn to_f64(&self) -> f64 {
        self.l as f64 / self.m as f64
    }
}

impl fmt::Display for RationalR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.l, self.m)
    }
}

impl FromStr for RationalR {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as l/m"));
        let (l, m) = s.split_once('/').ok_or_else(bad)?;
        RationalR::new(l.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?)
    }
}

impl Serialize for RationalR {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An exact value of `S_{N,r}`, stored as `num / m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalSum {
    pub num: i128,
    pub m: u32,
}

impl LocalSum {
    pub fn zero(m: u32) -> Self {
        LocalSum { num: 0, m }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.m))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.m as f64
    }
}

impl fmt::Display for LocalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.to_rational();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for LocalSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `alpha` and `beta` exact rationals, `r = l/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffConfig {
    alpha: BigRational,
    r: RationalR,
    beta: BigRational,
}

impl BirkhoffConfig {
    pub fn new(alpha: BigRational, r: RationalR, beta: BigRational) -> Result<Self> {
        if !alpha.is_positive() || alpha >= BigRational::one() {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} is not in (0, 1)")));
        }
        if beta.is_negative() || beta >= BigRational::one() {
            return Err(Error::InvalidParameter(format!("beta = {beta} is not in [0, 1)")));
        }
        Ok(BirkhoffConfig { alpha, r, beta })
    }

    /// `alpha = p / 2^64`, `beta = b / 2^64`.
    pub fn from_words(p: u64, r: RationalR, b: u64) -> Result<Self> {
        let q = BigInt::one() << 64u32;
        Self::new(BigRational::new(p.into(), q.clone()), r, BigRational::new(b.into(), q))
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn r(&self) -> RationalR {
        self.r
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    /// Common denominator `Q` with `alpha = P/Q`, `beta = B/Q`.
    pub(crate) fn integers(&self) -> (BigUint, BigUint, BigUint) {
        let q = self.alpha.denom().lcm(self.beta.denom());
        let p = self.alpha.numer() * (&q / self.alpha.denom());
        let b = self.beta.numer() * (&q / self.beta.denom());
        let u = |x: BigInt| x.to_biguint().expect("nonnegative");
        (u(p), u(b), u(q))
    }

    /// `S_1, S_2, ...` as numerators over `m`.
    pub fn scan(&self) -> Scan {
        let (p, b, q) = self.integers();
        let (l, m) = (self.r.l as u128, self.r.m as u128);
        let orbit = match (p.to_u128(), b.to_u128(), q.to_u128()) {
            // x m <= l Q  <=>  x <= floor(l Q / m) for integer x.
            (Some(p), Some(b), Some(q)) if q == 1 << 64 => Orbit::Word {
                x: b as u64,
                p: p as u64,
                thr: (l * q / m).min(u64::MAX as u128) as u64,
            },
            (Some(p), Some(b), Some(q)) if q < 1 << 64 => Orbit::Small {
                x: b,
                p,
                q,
                thr: l * q / m,
            },
            _ => Orbit::Big {
                lq: &q * BigUint::from(l),
                x: b,
                p,
                q,
                m: BigUint::from(m),
            },
        };
        Scan {
            orbit,
            s: 0,
            l: self.r.l as i128,
            m: self.r.m as i128,
        }
    }
}

/// `nP + B mod Q` by repeated addition.
enum Orbit {
    /// `Q = 2^64`: wrapping arithmetic.
    Word { x: u64, p: u64, thr: u64 },
    Small { x: u128, p: u128, q: u128, thr: u128 },
    Big { x: BigUint, p: BigUint, q: BigUint, lq: BigUint, m: BigUint },
}

impl Orbit {
    /// Advances to the next point and reports whether `{n alpha + beta}` lies
    /// in `[0, r]`, i.e. `x m <= l Q`.
    #[inline]
    fn step(&mut self) -> bool {
        match self {
            Orbit::Word { x, p, thr } => {
                *x = x.wrapping_add(*p);
                *x <= *thr
            }
            Orbit::Small { x, p, q, thr } => {
                *x += *p;
                if *x >= *q {
                    *x -= *q;
                }
                *x <= *thr
            }
            Orbit::Big { x, p, q, lq, m } => {
                *x += &*p;
                if *x >= *q {
                    *x -= &*q;
                }
                &*x * &*m <= *lq
            }
        }
    }
}

/// Running Birkhoff sums; yields `m S_N` for `N = 1, 2, ...`.
pub struct Scan {
    orbit: Orbit,
    s: i128,
    l: i128,
    m: i128,
}

impl Scan {
    pub fn m(&self) -> u32 {
        self.m as u32
    }
}

impl Iterator for Scan {
    type Item = i128;

    #[inline]
    fn next(&mut self) -> Option<i128> {
        // Each step adds 1 - r or -r.
        self.s += self.orbit.step() as i128 * self.m - self.l;
        Some(self.s)
    }
}

/// `S_{N,r}(alpha, beta) = #{1 <= n <= N : {n alpha + beta} in [0, r]} - rN`.
pub fn birkhoff_sum(cfg: &BirkhoffConfig, n: u64) -> LocalSum {
    let m = cfg.r.m;
    let num = cfg.scan().take(n as usize).last().unwrap_or(0);
    LocalSum { num, m }
}

/// Largest `N * M` scanned by [`brute_maxmin`].
pub const BRUTE_BUDGET: u128 = 1 << 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MaxMin {
    pub big_m: u64,
    pub max: LocalSum,
    pub min: LocalSum,
    pub argmax: u64,
    pub argmin: u64,
}

/// `max` and `min` of `S_{N,r}` over `0 <= N < M`, first attaining `N`.
pub fn brute_maxmin(cfg: &BirkhoffConfig, big_m: u64) -> Result<MaxMin> {
    Ok(brute_maxmin_prefixes(cfg, &[big_m])?.remove(0))
}

/// [`brute_maxmin`] for several `M` in one pass; `ms` must be increasing.
pub fn brute_maxmin_prefixes(cfg: &BirkhoffConfig, ms: &[u64]) -> Result<Vec<MaxMin>> {
    check_targets(ms)?;
    let m = cfg.r.m;
    let (mut max, mut min, mut argmax, mut argmin) = (0i128, 0i128, 0u64, 0u64);
    let mut out = Vec::with_capacity(ms.len());
    let mut scan = cfg.scan();
    let mut n = 0u64;
    for &big_m in ms {
        // S_0 .. S_n are accounted for; extend to S_{M-1}.
        for s in scan.by_ref().take((big_m - 1 - n) as usize) {
            n += 1;
            if s > max {
                max = s;
                argmax = n;
            }
            if s < min {
                min = s;
                argmin = n;
            }
        }
        out.push(MaxMin {
            big_m,
            max: LocalSum { num: max, m },
            min: LocalSum { num: min, m },
            argmax,
            argmin,
        });
    }
    Ok(out)
}

/// [`brute_maxmin_prefixes`] for several `r` at once along the orbit of
/// `alpha = p / 2^64`, `beta = 0`; `out[i]` belongs to `rs[i]`.
pub fn brute_maxmin_words(p: u64, rs: &[RationalR], ms: &[u64]) -> Result<Vec<Vec<MaxMin>>> {
    check_targets(ms)?;
    let q = 1u128 << 64;
    let thr: Vec<u64> = rs
        .iter()
        .map(|r| (r.l as u128 * q / r.m as u128).min(u64::MAX as u128) as u64)
        .collect();
    Ok(rs
        .iter()
        .zip(thr)
        .map(|(r, thr)| word_scan(p, thr, r.l as i64, r.m, ms))
        .collect())
}

/// One pass over `S_0, ..., S_{M-1}` for `alpha = p / 2^64`, `beta = 0`.
fn word_scan(p: u64, thr: u64, l: i64, m: u32, ms: &[u64]) -> Vec<MaxMin> {
    // |S| <= M m stays far inside i64 within the budget.
    let mi = m as i64;
    let (mut s, mut hi, mut lo) = (0i64, 0i64, 0i64);
    let (mut arg_hi, mut arg_lo) = (0u64, 0u64);
    let (mut x, mut n) = (0u64, 0u64);
    let mut out = Vec::with_capacity(ms.len());
    for &big_m in ms {
        while n + 1 < big_m {
            n += 1;
            x = x.wrapping_add(p);
            // Branch-free: the comparison is a coin flip.
            s += (x <= thr) as i64 * mi - l;
            if s > hi {
                hi = s;
                arg_hi = n;
            } else if s < lo {
                lo = s;
                arg_lo = n;
            }
        }
        out.push(MaxMin {
            big_m,
            max: LocalSum { num: hi as i128, m },
            min: LocalSum { num: lo as i128, m },
            argmax: arg_hi,
            argmin: arg_lo,
        });
    }
    out
}

fn check_targets(ms: &[u64]) -> Result<()> {
    if ms.is_empty() || ms[0] == 0 || ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("M values must be positive and increasing".into()));
    }
    let last = *ms.last().expect("nonempty") as u128;
    if last > BRUTE_BUDGET {
        return Err(Error::BudgetExceeded {
            required: last,
            budget: BRUTE_BUDGET,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn quarter_rotation_example() {
        let cfg = BirkhoffConfig::new(rat(1, 4), RationalR::new(1, 2).unwrap(), rat(0, 1)).unwrap();
        assert_eq!(birkhoff_sum(&cfg, 0), LocalSum::zero(2));
        assert_eq!(birkhoff_sum(&cfg, 4).to_rational(), rat(1, 1));
    }

    #[test]
    fn increments_are_one_minus_r_or_minus_r() {
        let r = RationalR::new(2, 5).unwrap();
        let cfg = BirkhoffConfig::new(rat(7, 31), r, rat(3, 17)).unwrap();
        let mut prev = 0;
        for s in cfg.scan().take(500) {
            assert!(s - prev == 3 || s - prev == -2);
            prev = s;
        }
    }

    #[test]
    fn direct_reduction_matches_scan() {
        let r = RationalR::new(3, 7).unwrap();
        let cfg = BirkhoffConfig::new(rat(355, 1131), r, rat(1, 3)).unwrap();
        let (p, b, q) = cfg.integers();
        let mut count = 0i64;
        for (i, s) in cfg.scan().take(2000).enumerate() {
            let n = BigUint::from(i as u64 + 1);
            let x = (&n * &p + &b) % &q;
            if &x * 7u32 <= &q * 3u32 {
                count += 1;
            }
            let expect = rat(count, 1) - rat(3 * (i as i64 + 1), 7);
            assert_eq!(LocalSum { num: s, m: 7 }.to_rational(), expect);
        }
    }

    #[test]
    fn closed_interval_counts_the_endpoint() {
        // {1/2} = r lands exactly on the boundary.
        let cfg = BirkhoffConfig::new(rat(1, 2), RationalR::new(1, 2).unwrap(), rat(0, 1)).unwrap();
        assert_eq!(birkhoff_sum(&cfg, 1).to_rational(), rat(1, 2));
    }

    #[test]
    fn big_and_small_orbits_agree() {
        let r = RationalR::new(1, 3).unwrap();
        let small = BirkhoffConfig::from_words(0x9e37_79b9_7f4a_7c15, r, 12345).unwrap();
        // Same alpha and beta written over 2^70.
        let q = BigInt::one() << 70u32;
        let big = BirkhoffConfig::new(
            BigRational::new(BigInt::from(0x9e37_79b9_7f4a_7c15u64) << 6, q.clone()),
            r,
            BigRational::new(BigInt::from(12345) << 6, q),
        )
        .unwrap();
        assert!(big.scan().take(3000).eq(small.scan().take(3000)));
    }

    #[test]
    fn brute_maxmin_basics() {
        let cfg = BirkhoffConfig::new(rat(5, 13), RationalR::new(1, 2).unwrap(), rat(0, 1)).unwrap();
        let one = brute_maxmin(&cfg, 1).unwrap();
        assert_eq!((one.max.num, one.min.num, one.argmax, one.argmin), (0, 0, 0, 0));
        let mm = brute_maxmin(&cfg, 300).unwrap();
        assert_eq!(birkhoff_sum(&cfg, mm.argmax), mm.max);
        assert_eq!(birkhoff_sum(&cfg, mm.argmin), mm.min);
        assert!(mm.min.num <= 0 && mm.max.num >= 0);
        let pre = brute_maxmin_prefixes(&cfg, &[1, 50, 300]).unwrap();
        assert_eq!(pre[2], mm);
        assert!(brute_maxmin_prefixes(&cfg, &[5, 5]).is_err());
    }

    #[test]
    fn word_brute_matches_single_scans() {
        let p = 0x6a09_e667_f3bc_c909u64;
        let rs: Vec<RationalR> = ["1/2", "1/3", "2/5", "3/7"].iter().map(|s| s.parse().unwrap()).collect();
        let ms = [1, 2, 17, 1000, 4321];
        let multi = brute_maxmin_words(p, &rs, &ms).unwrap();
        for (r, got) in rs.iter().zip(multi) {
            let cfg = BirkhoffConfig::from_words(p, *r, 0).unwrap();
            assert_eq!(got, brute_maxmin_prefixes(&cfg, &ms).unwrap());
        }
    }

    #[test]
    fn parse_r() {
        assert_eq!("2/4".parse::<RationalR>().unwrap(), RationalR::new(1, 2).unwrap());
        assert!("1/1".parse::<RationalR>().is_err());
        assert!("0/3".parse::<RationalR>().is_err());
        assert!("x".parse::<RationalR>().is_err());
    }
}
