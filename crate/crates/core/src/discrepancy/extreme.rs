use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// `alpha = P/Q` with `Q <= 2^64`.
fn words(alpha: &BigRational) -> Result<(u128, u128)> {
    if !alpha.is_positive() || *alpha >= BigRational::one() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} is not in (0, 1)")));
    }
    match (alpha.numer().to_u128(), alpha.denom().to_u128()) {
        (Some(p), Some(q)) if q <= 1 << 64 => Ok((p, q)),
        _ => Err(Error::InvalidParameter("alpha denominator exceeds 2^64".into())),
    }
}

/// `Q {n alpha}` for `n = 1..N`, sorted.
pub(crate) fn sorted_points(p: u128, q: u128, n: u64) -> Vec<u64> {
    let mut x = 0u128;
    let mut pts: Vec<u64> = (0..n)
        .map(|_| {
            x += p;
            if x >= q {
                x -= q;
            }
            x as u64
        })
        .collect();
    pts.sort_unstable();
    pts
}

/// `Q D_N` from sorted `Q {n alpha}`.
///
/// Overcounts are attained on closed intervals `[v_i, v_j]` between point
/// values, undercounts on open intervals whose ends are point values or
/// `0`, `1`.
pub(crate) fn scaled_discrepancy(pts: &[u64], q: u128) -> i128 {
    let n = pts.len() as i128;
    let q = q as i128;
    // Distinct values with cumulative counts #{x <= v}.
    let mut vals: Vec<(i128, i128)> = Vec::new();
    for (i, &x) in pts.iter().enumerate() {
        let x = x as i128;
        match vals.last_mut() {
            Some(last) if last.0 == x => last.1 = i as i128 + 1,
            _ => vals.push((x, i as i128 + 1)),
        }
    }
    // Overcount: (C_j - N v_j) - (C_{i-1} - N v_i), Q-scaled: C Q - N v.
    let mut best = i128::MIN;
    let mut low = i128::MAX;
    let mut prev_c = 0i128;
    for &(v, c) in &vals {
        low = low.min(prev_c * q - n * v);
        best = best.max(c * q - n * v - low);
        prev_c = c;
    }
    // Undercount over (a, b): N(b - a) - (#{x < b} - #{x <= a}).
    let mut ends: Vec<(i128, i128, i128)> = Vec::with_capacity(vals.len() + 2);
    // (value, #{x < value}, #{x <= value})
    let mut below = 0i128;
    if vals.first().map(|v| v.0) != Some(0) {
        ends.push((0, 0, 0));
    }
    for &(v, c) in &vals {
        ends.push((v, below, c));
        below = c;
    }
    ends.push((q, n, n));
    let mut hi = i128::MIN;
    for &(v, lt, le) in &ends {
        if hi != i128::MIN {
            best = best.max(n * v - lt * q + hi);
        }
        hi = hi.max(le * q - n * v);
    }
    best
}

/// Unnormalised extreme discrepancy of `{n alpha}`, `n = 1..N`, exactly.
pub fn extreme_discrepancy(alpha: &BigRational, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let (p, q) = words(alpha)?;
    let d = scaled_discrepancy(&sorted_points(p, q, n), q);
    Ok(BigRational::new(BigInt::from(d), BigInt::from(q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{birkhoff_sum, BirkhoffConfig, RationalR};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// All intervals with ends in `{0, 1} ∪ points`, each end open or
    /// closed, counted point by point.
    fn brute(alpha: &BigRational, n: u64) -> BigRational {
        let (p, q) = words(alpha).unwrap();
        let pts: Vec<u128> = (1..=n as u128).map(|k| k * p % q).collect();
        let mut ends: Vec<u128> = pts.clone();
        ends.extend([0, q]);
        ends.sort_unstable();
        ends.dedup();
        let mut best = 0i128;
        for (i, &a) in ends.iter().enumerate() {
            for &b in &ends[i..] {
                for (ca, cb) in [(true, true), (true, false), (false, true), (false, false)] {
                    if a == b && !(ca && cb) {
                        continue;
                    }
                    let c = pts
                        .iter()
                        .filter(|&&x| (if ca { x >= a } else { x > a }) && (if cb { x <= b } else { x < b }))
                        .count() as i128;
                    let v = (c * q as i128 - n as i128 * (b - a) as i128).abs();
                    best = best.max(v);
                }
            }
        }
        BigRational::new(BigInt::from(best), BigInt::from(q))
    }

    #[test]
    fn small_examples() {
        assert_eq!(extreme_discrepancy(&rat(3, 10), 1).unwrap(), rat(1, 1));
        assert_eq!(extreme_discrepancy(&rat(1, 4), 1).unwrap(), rat(1, 1));
        // {n/2}, n = 1, 2: points 1/2 and 0.
        assert_eq!(extreme_discrepancy(&rat(1, 2), 2).unwrap(), brute(&rat(1, 2), 2));
        assert!(extreme_discrepancy(&rat(1, 2), 0).is_err());
        assert!(extreme_discrepancy(&rat(3, 2), 4).is_err());
    }

    #[test]
    fn two_points_quarter_and_three_quarters() {
        let pts = [1u64, 3];
        assert_eq!(scaled_discrepancy(&pts, 4), 4);
    }

    #[test]
    fn matches_brute_force() {
        for (p, q) in [(2u64, 7u64), (5, 13), (355, 1131), (1, 3), (89, 144), (7, 64)] {
            for n in [1u64, 2, 3, 5, 10, 40, 97] {
                let a = BigRational::new(p.into(), q.into());
                assert_eq!(extreme_discrepancy(&a, n).unwrap(), brute(&a, n), "{p}/{q} N = {n}");
            }
        }
    }

    #[test]
    fn dominates_local_discrepancy() {
        let alpha = BigRational::new(0x9e37_79b9_7f4a_7c15u64.into(), BigInt::one() << 64u32);
        for r in ["1/2", "1/3", "2/5"] {
            let r: RationalR = r.parse().unwrap();
            let cfg = BirkhoffConfig::new(alpha.clone(), r, rat(0, 1)).unwrap();
            for n in [10u64, 100, 1000] {
                let s = birkhoff_sum(&cfg, n).to_rational();
                assert!(extreme_discrepancy(&alpha, n).unwrap() >= s.abs());
            }
        }
    }
}
