use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::CFExpansion;
use crate::zmod::{ModMatrix, Modulus};

/// `(p_{n-1}, p_n, q_{n-1}, q_n)` at index `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentState {
    pub n: usize,
    pub p_prev: BigUint,
    pub p_cur: BigUint,
    pub q_prev: BigUint,
    pub q_cur: BigUint,
}

impl ConvergentState {
    /// `n = 0`: `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.
    pub fn initial() -> Self {
        ConvergentState {
            n: 0,
            p_prev: BigUint::one(),
            p_cur: BigUint::zero(),
            q_prev: BigUint::zero(),
            q_cur: BigUint::one(),
        }
    }

    pub fn advance(&self, a: u64) -> Self {
        ConvergentState {
            n: self.n + 1,
            p_prev: self.p_cur.clone(),
            p_cur: &self.p_cur * a + &self.p_prev,
            q_prev: self.q_cur.clone(),
            q_cur: &self.q_cur * a + &self.q_prev,
        }
    }

    /// `q_n p_{n-1} - q_{n-1} p_n == (-1)^n`.
    pub fn determinant_identity_holds(&self) -> bool {
        let lhs = BigInt::from(&self.q_cur * &self.p_prev) - BigInt::from(&self.q_prev * &self.p_cur);
        let rhs = if self.n.is_multiple_of(2) { 1 } else { -1 };
        lhs == BigInt::from(rhs)
    }

    pub fn reduce(&self, m: u32) -> ModMatrix {
        let r = |x: &BigUint| (x % m).to_u64().expect("reduced");
        ModMatrix::new(m, r(&self.p_prev), r(&self.p_cur), r(&self.q_prev), r(&self.q_cur))
    }
}

/// States for `n = 0, 1, ..., K`.
pub fn convergent_stream(cf: &CFExpansion) -> impl Iterator<Item = ConvergentState> + '_ {
    let mut state = Some(ConvergentState::initial());
    let mut qs = cf.quotients().iter();
    std::iter::from_fn(move || {
        let cur = state.take()?;
        state = qs.next().map(|&a| cur.advance(a));
        Some(cur)
    })
}

/// `P_n` at index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PnState {
    pub n: usize,
    pub matrix: ModMatrix,
}

/// `P_0 = I` and `P_n = P_{n-1} h(a_n mod m)`, for `n = 0..=K`.
pub fn pn_stream<'a>(cf: &'a CFExpansion, m: &Modulus) -> impl Iterator<Item = PnState> + 'a {
    pn_stream_from(cf.quotients(), m.m())
}

fn pn_stream_from(quotients: &[u64], m: u32) -> impl Iterator<Item = PnState> + '_ {
    let mut cur = Some(PnState {
        n: 0,
        matrix: ModMatrix::identity(m),
    });
    let mut qs = quotients.iter();
    std::iter::from_fn(move || {
        let out = cur.take()?;
        cur = qs.next().map(|&a| PnState {
            n: out.n + 1,
            matrix: out.matrix.mul_h((a % m as u64) as u32),
        });
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::expand_rational;

    #[test]
    fn convergents_of_7_17() {
        let cf = CFExpansion::new(vec![2, 2, 3]).unwrap();
        let last = convergent_stream(&cf).last().unwrap();
        assert_eq!((last.p_cur, last.q_cur), (BigUint::from(7u32), BigUint::from(17u32)));
    }

    #[test]
    fn fibonacci_denominators() {
        let cf = CFExpansion::new(vec![1; 10]).unwrap();
        let qs: Vec<u64> = convergent_stream(&cf).map(|s| s.q_cur.to_u64().unwrap()).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert!(convergent_stream(&cf).all(|s| s.determinant_identity_holds()));
    }

    #[test]
    fn mirror_identity() {
        let cf = CFExpansion::new(vec![3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
        for s in convergent_stream(&cf).skip(1) {
            let mirror = expand_rational(&s.q_prev.clone().into(), &s.q_cur.clone().into()).unwrap();
            let mut rev: Vec<u64> = cf.quotients()[..s.n].iter().rev().copied().collect();
            // [.., x, 1] and [.., x + 1] are the same rational.
            if rev.len() > 1 && rev[rev.len() - 1] == 1 {
                rev.pop();
                *rev.last_mut().unwrap() += 1;
            }
            assert_eq!(mirror.quotients(), rev.as_slice(), "n = {}", s.n);
        }
    }

    #[test]
    fn pn_fibonacci_mod_two() {
        let cf = CFExpansion::new(vec![1; 9]).unwrap();
        let m = Modulus::new(2).unwrap();
        let q: Vec<u32> = pn_stream(&cf, &m).skip(1).map(|s| s.matrix.entries()[3]).collect();
        assert_eq!(q, vec![1, 0, 1, 1, 0, 1, 1, 0, 1]);
    }

    #[test]
    fn pn_final_column() {
        let cf = CFExpansion::new(vec![2, 2, 3]).unwrap();
        let m = Modulus::new(5).unwrap();
        let last = pn_stream(&cf, &m).last().unwrap();
        assert_eq!((last.matrix.entries()[1], last.matrix.entries()[3]), (2, 2));
        for s in pn_stream(&cf, &m) {
            let expect = if s.n % 2 == 0 { 1 } else { 4 };
            assert_eq!(s.matrix.det(), expect);
        }
    }
}
