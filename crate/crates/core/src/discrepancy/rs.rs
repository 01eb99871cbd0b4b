use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::birkhoff::RationalR;
use crate::cf::CFExpansion;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RsEstimate {
    pub k: usize,
    /// `num/den`.
    pub max_est: String,
    pub min_est: String,
    #[serde(skip)]
    pub max_exact: BigRational,
    #[serde(skip)]
    pub min_exact: BigRational,
}

impl RsEstimate {
    pub fn max_f64(&self) -> f64 {
        super::rational_f64(&self.max_exact)
    }

    pub fn min_f64(&self) -> f64 {
        super::rational_f64(&self.min_exact)
    }
}

/// `q_{-1}, q_0, ..., q_{n}` reduced mod `m`, with `q_{-1} = 0`.
fn q_residues(a: &[u64], m: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + 2);
    out.push(0);
    out.push(1 % m);
    for (j, &aj) in a.iter().enumerate() {
        let next = ((aj % m) as u128 * out[j + 1] as u128 + out[j] as u128) % m as u128;
        out.push(next as u64);
    }
    out
}

/// The alternating sums approximating `max` and `min` of `S_{N,r}` over
/// `0 <= N < q_{k+1}`:
///
/// `sum_j {q_j r}((1 - {q_j r}) a_{j+1} + {q_{j+1} r} - {q_{j-1} r})`
///
/// over even `j <= k` for the maximum and over odd `j <= k` (negated) for
/// the minimum. Only `q_j mod m` enters.
pub fn rs_maxmin(cf: &CFExpansion, k: usize, r: RationalR) -> Result<RsEstimate> {
    let a = cf.quotients();
    if a.len() < k + 2 {
        return Err(Error::InvalidParameter(format!(
            "{} partial quotients, need {} for k = {k}",
            a.len(),
            k + 2
        )));
    }
    let (l, m) = (r.l() as u64, r.m() as u64);
    let q = q_residues(&a[..k + 1], m);
    // u_j = m {q_j r}, index shifted by one: u(j) = q[j + 1] l mod m.
    let u = |j: isize| -> i128 { ((q[(j + 1) as usize] as u128 * l as u128) % m as u128) as i128 };
    let mi = m as i128;
    let (mut even, mut odd) = (BigInt::from(0), BigInt::from(0));
    for j in 0..=k as isize {
        // m^2 times the j-th term.
        let uj = u(j);
        let aj1 = BigInt::from(a[j as usize]);
        let t = BigInt::from(uj) * (BigInt::from(mi - uj) * aj1 + BigInt::from(u(j + 1) - u(j - 1)));
        if j % 2 == 0 {
            even += t;
        } else {
            odd += t;
        }
    }
    let den = BigInt::from(mi * mi);
    let max_exact = BigRational::new(even, den.clone());
    let min_exact = -BigRational::new(odd, den);
    Ok(RsEstimate {
        k,
        max_est: format!("{}/{}", max_exact.numer(), max_exact.denom()),
        min_est: format!("{}/{}", min_exact.numer(), min_exact.denom()),
        max_exact,
        min_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_parity_for_golden_quotients() {
        let q = q_residues(&[1; 9], 2);
        // q_{-1}, q_0, q_1, ... = 0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55 mod 2
        assert_eq!(q, vec![0, 1, 1, 0, 1, 1, 0, 1, 1, 0, 1]);
    }

    #[test]
    fn golden_half_terms() {
        let cf = CFExpansion::new(vec![1; 20]).unwrap();
        let r = RationalR::new(1, 2).unwrap();
        let e = rs_maxmin(&cf, 2, r).unwrap();
        // {q_j/2}: j=-1: 0, j=0: 1/2, j=1: 1/2, j=2: 0, j=3: 1/2.
        // even j: j=0: 1/2 (1/2 + 1/2 - 0) = 1/2; j=2: 0.
        // odd j: j=1: 1/2 (1/2 + 0 - 1/2) = 0.
        assert_eq!(e.max_est, "1/2");
        assert_eq!(e.min_est, "0/1");
        assert!(rs_maxmin(&cf, 18, r).is_ok());
        assert!(rs_maxmin(&cf, 19, r).is_err());
    }
}
