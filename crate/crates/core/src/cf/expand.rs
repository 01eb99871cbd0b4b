use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::euclid::QuotientStream;
use super::DyadicInterval;
use crate::error::{Error, Result};

/// A validated prefix `a_1..a_K` of partial quotients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CFExpansion {
    quotients: Vec<u64>,
    exhausted_precision: bool,
}

impl CFExpansion {
    pub fn new(quotients: Vec<u64>) -> Result<Self> {
        if quotients.contains(&0) {
            return Err(Error::InvalidParameter("partial quotients must be positive".into()));
        }
        Ok(CFExpansion {
            quotients,
            exhausted_precision: false,
        })
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// True when the prefix stopped because the input interval could not
    /// decide the next quotient (as opposed to reaching a requested length).
    pub fn exhausted_precision(&self) -> bool {
        self.exhausted_precision
    }

    /// `[0; a_1, ..., a_K]` as an exact rational.
    pub fn value(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for &a in self.quotients.iter().rev() {
            acc = (BigRational::from_integer(BigInt::from(a)) + acc).recip();
        }
        acc
    }

    pub fn truncated(&self, k: usize) -> CFExpansion {
        CFExpansion {
            quotients: self.quotients[..k.min(self.len())].to_vec(),
            exhausted_precision: self.exhausted_precision && k >= self.len(),
        }
    }
}

/// Canonical expansion of `p/q` with `0 <= p < q`; the last quotient is at
/// least 2 unless the expansion has a single term.
pub fn expand_rational(p: &BigInt, q: &BigInt) -> Result<CFExpansion> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p.is_negative() || q.is_negative() || p >= q {
        return Err(Error::InvalidRational(format!("{p}/{q} is not in [0, 1)")));
    }
    let g = p.gcd(q);
    let (p, q) = (
        (p / &g).to_biguint().expect("nonnegative"),
        (q / &g).to_biguint().expect("positive"),
    );
    let quotients = QuotientStream::new(q, p).collect::<Result<Vec<u64>>>()?;
    Ok(CFExpansion {
        quotients,
        exhausted_precision: false,
    })
}

pub fn expand_rational_u64(p: u64, q: u64) -> Result<CFExpansion> {
    expand_rational(&BigInt::from(p), &BigInt::from(q))
}

/// Partial quotients shared by every point of the interval.
pub fn expand_interval(iv: &DyadicInterval) -> CFExpansion {
    expand_interval_limited(iv, None)
}

/// Like [`expand_interval`] but stops after `max_len` quotients.
///
/// Both endpoints are expanded in lockstep. The result is the longest
/// prefix `a` such that each endpoint lies in the closed cylinder of `a`,
/// i.e. `a` is a prefix of either the canonical or the alternative
/// (`..., a_K - 1, 1`) expansion of each endpoint. Every real in the
/// interval then has `a` as its leading partial quotients (up to the
/// rational boundary points of the cylinder).
pub fn expand_interval_limited(iv: &DyadicInterval, max_len: Option<usize>) -> CFExpansion {
    let den = iv.denominator();
    let lo_num = iv.numerator().clone();
    let hi_num: BigUint = iv.numerator() + 1u32;
    let mut lo = QuotientStream::new(den.clone(), lo_num);
    let mut hi = QuotientStream::new(den, hi_num);
    let mut out: Vec<u64> = Vec::new();
    loop {
        if max_len.is_some_and(|k| out.len() >= k) {
            return CFExpansion {
                quotients: out,
                exhausted_precision: false,
            };
        }
        let x = lo.next();
        let y = hi.next();
        match (&x, &y) {
            (Some(Ok(a)), Some(Ok(b))) if a == b => out.push(*a),
            _ => {
                let extra = resolve_divergence(out.last().copied(), x, &mut lo, y, &mut hi);
                out.extend(extra);
                if let Some(k) = max_len {
                    out.truncate(k);
                }
                return CFExpansion {
                    quotients: out,
                    exhausted_precision: true,
                };
            }
        }
    }
}

/// A short window of an endpoint's expansion starting at the last common
/// quotient.
struct Tail {
    terms: Vec<u64>,
    /// The expansion ends exactly at the window's last term.
    complete: bool,
}

const LOOKAHEAD: usize = 3;

fn read_tail(last: Option<u64>, first: Option<Result<u64>>, rest: &mut QuotientStream) -> Tail {
    let mut terms: Vec<u64> = last.into_iter().collect();
    let mut next = first;
    for _ in 0..=LOOKAHEAD {
        match next {
            Some(Ok(a)) => terms.push(a),
            None => return Tail { terms, complete: true },
            Some(Err(_)) => return Tail { terms, complete: false },
        }
        next = rest.next();
    }
    Tail {
        terms,
        complete: false,
    }
}

fn forms(tail: &Tail) -> Vec<Vec<u64>> {
    let mut out = vec![tail.terms.clone()];
    if tail.complete {
        if let Some((&last, head)) = tail.terms.split_last() {
            if last >= 2 {
                let mut alt = head.to_vec();
                alt.extend([last - 1, 1]);
                out.push(alt);
            }
        }
    }
    out
}

fn resolve_divergence(
    last: Option<u64>,
    x: Option<Result<u64>>,
    lo: &mut QuotientStream,
    y: Option<Result<u64>>,
    hi: &mut QuotientStream,
) -> Vec<u64> {
    let tl = read_tail(last, x, lo);
    let th = read_tail(last, y, hi);
    let skip = usize::from(last.is_some());
    let mut best: Vec<u64> = Vec::new();
    for a in forms(&tl) {
        for b in forms(&th) {
            let lcp = a.iter().zip(&b).take_while(|(u, v)| u == v).count();
            // Forms that rewrite the last common quotient share less than it.
            if lcp >= skip && lcp - skip > best.len() {
                best = a[skip..lcp].to_vec();
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rational_examples() {
        assert_eq!(expand_rational_u64(7, 17).unwrap().quotients(), &[2, 2, 3]);
        assert!(expand_rational_u64(0, 1).unwrap().is_empty());
        assert_eq!(expand_rational_u64(1, 2).unwrap().quotients(), &[2]);
        assert_eq!(
            expand_rational_u64(7, 17).unwrap().value(),
            BigRational::new(7.into(), 17.into())
        );
        assert_eq!(expand_rational_u64(1, 0), Err(Error::ZeroDenominator));
        assert!(expand_rational_u64(3, 2).is_err());
    }

    #[test]
    fn non_reduced_input_is_reduced() {
        assert_eq!(expand_rational_u64(14, 34).unwrap().quotients(), &[2, 2, 3]);
    }

    #[test]
    fn interval_prefix_is_sound_for_interior_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let bits = rng.gen_range(8..200u32);
            let iv = DyadicInterval::random(&mut rng, bits);
            let cf = expand_interval(&iv);
            for _ in 0..5 {
                let extra = 40;
                let mut probe = iv.clone();
                probe.refine(&mut rng, extra);
                let num = BigInt::from(probe.numerator().clone()) * 2 + 1;
                let den = BigInt::from(probe.denominator()) * 2;
                let full = expand_rational(&num, &den).unwrap();
                assert!(
                    full.quotients().starts_with(cf.quotients()),
                    "{:?} vs {:?}",
                    cf.quotients(),
                    full.quotients()
                );
            }
        }
    }

    #[test]
    fn cylinder_boundary_endpoint() {
        // [1/4, 1/2] = closed cylinder a_1 = 2 (endpoints [4] = [3, 1] and [2]).
        let iv = DyadicInterval::new(BigUint::from(1u32), 2).unwrap();
        assert_eq!(expand_interval(&iv).quotients(), &[]);
        // [3/8, 1/2] lies in the cylinder a_1 = 2.
        let iv = DyadicInterval::new(BigUint::from(3u32), 3).unwrap();
        assert_eq!(expand_interval(&iv).quotients(), &[2]);
    }

    #[test]
    fn prefix_length_grows_with_bits() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let bits = 4096;
        let mut total = 0;
        for _ in 0..20 {
            let num = rng.gen_biguint(bits as u64);
            let cf = expand_interval(&DyadicInterval::new(num, bits).unwrap());
            assert!(cf.exhausted_precision());
            total += cf.len();
        }
        assert!(total as f64 / 20.0 >= 0.25 * bits as f64, "{total}");
    }

    #[test]
    fn limited_expansion_stops_early() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let iv = DyadicInterval::random(&mut rng, 2048);
        let full = expand_interval(&iv);
        let part = expand_interval_limited(&iv, Some(10));
        assert_eq!(part.quotients(), &full.quotients()[..10]);
        assert!(!part.exhausted_precision());
    }

    #[test]
    fn validated_constructor() {
        assert!(CFExpansion::new(vec![1, 0]).is_err());
        assert_eq!(CFExpansion::new(vec![1, 1]).unwrap().value(), BigRational::new(1.into(), 2.into()));
        assert_eq!(CFExpansion::new(vec![]).unwrap().value(), BigRational::zero());
    }
}
