//! Euclidean quotient streams with Lehmer's acceleration.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Lazily yields the Euclidean quotients of `(a, b)`: `floor(a/b)`, then
/// the quotients of `(b, a mod b)`, until the remainder vanishes.
///
/// Large operands are reduced with Lehmer's method: runs of quotients are
/// read off the leading 64 bits with single-precision cosequences, and
/// applied to the full numbers in one linear combination. A quotient that
/// does not fit in `u64` is reported once as [`Error::QuotientOverflow`] and
/// ends the stream.
#[derive(Debug, Clone)]
pub struct QuotientStream {
    a: BigUint,
    b: BigUint,
    buf: VecDeque<u64>,
    overflow: bool,
    finished: bool,
}

impl QuotientStream {
    pub fn new(a: BigUint, b: BigUint) -> Self {
        QuotientStream {
            a,
            b,
            buf: VecDeque::new(),
            overflow: false,
            finished: false,
        }
    }

    fn refill(&mut self) {
        if self.b.is_zero() {
            return;
        }
        if self.a.bits() <= 128 {
            self.refill_native();
            return;
        }
        let s = self.a.bits() - 64;
        let mut u = (&self.a >> s).to_u64().expect("64 leading bits") as i128;
        let mut v = (&self.b >> s).to_u64().expect("at most 64 leading bits") as i128;
        let (mut ca, mut cb, mut cc, mut cd): (i128, i128, i128, i128) = (1, 0, 0, 1);
        let mut run = Vec::new();
        loop {
            let (den1, den2) = (v + cc, v + cd);
            if den1 <= 0 || den2 <= 0 {
                break;
            }
            let q = (u + ca).div_euclid(den1);
            if q != (u + cb).div_euclid(den2) {
                break;
            }
            let t = ca - q * cc;
            ca = cc;
            cc = t;
            let t = cb - q * cd;
            cb = cd;
            cd = t;
            let t = u - q * v;
            u = v;
            v = t;
            run.push(q as u64);
        }
        if cb == 0 {
            let (q, r) = self.a.div_rem(&self.b);
            self.a = std::mem::replace(&mut self.b, r);
            match q.to_u64() {
                Some(q) => self.buf.push_back(q),
                None => {
                    self.overflow = true;
                    self.b = BigUint::zero();
                }
            }
        } else {
            let na = combine(ca, &self.a, cb, &self.b);
            let nb = combine(cc, &self.a, cd, &self.b);
            self.a = na;
            self.b = nb;
            self.buf.extend(run);
        }
    }

    fn refill_native(&mut self) {
        let mut a = self.a.to_u128().expect("fits");
        let mut b = self.b.to_u128().expect("fits");
        while b != 0 {
            let q = a / b;
            let r = a % b;
            a = b;
            b = r;
            match u64::try_from(q) {
                Ok(q) => self.buf.push_back(q),
                Err(_) => {
                    self.overflow = true;
                    b = 0;
                }
            }
        }
        self.a = BigUint::from(a);
        self.b = BigUint::zero();
    }
}

/// `x a + y b` for cosequence coefficients of opposite sign (or zero); the
/// result is nonnegative by construction.
fn combine(x: i128, a: &BigUint, y: i128, b: &BigUint) -> BigUint {
    let mag = |t: i128| BigUint::from(t.unsigned_abs());
    match (x >= 0, y >= 0) {
        (true, true) => mag(x) * a + mag(y) * b,
        (true, false) => mag(x) * a - mag(y) * b,
        (false, true) => mag(y) * b - mag(x) * a,
        (false, false) => unreachable!("cosequence coefficients share a sign"),
    }
}

impl Iterator for QuotientStream {
    type Item = Result<u64>;

    fn next(&mut self) -> Option<Result<u64>> {
        if self.finished {
            return None;
        }
        while self.buf.is_empty() && !self.b.is_zero() {
            self.refill();
        }
        if let Some(q) = self.buf.pop_front() {
            return Some(Ok(q));
        }
        self.finished = true;
        if self.overflow {
            Some(Err(Error::QuotientOverflow))
        } else {
            None
        }
    }
}
