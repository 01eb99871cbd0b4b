//! Small number-theoretic helpers shared by the group and constant modules.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let ext = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(m as i128) as u64)
}

/// All solutions `x` in `[0, m)` of `a x ≡ b (mod m)`, ascending.
///
/// A solution exists iff `g = gcd(a, m)` divides `b`; then there are exactly
/// `g` of them, spaced `m / g` apart.
pub fn solve_linear_congruence(a: u64, b: u64, m: u64) -> Vec<u64> {
    let a = a % m;
    let b = b % m;
    let g = gcd(a, m);
    if !b.is_multiple_of(g) {
        return Vec::new();
    }
    let step = m / g;
    let x0 = if step == 1 {
        0
    } else {
        let inv = mod_inverse(a / g, step).expect("reduced coefficient is a unit");
        ((b / g) as u128 * inv as u128 % step as u128) as u64
    };
    (0..g).map(|k| x0 + k * step).collect()
}

/// Neumaier-compensated accumulator. The sum of a fixed sequence is
/// reproducible to the last bit, and much less sensitive to ordering than a
/// naive running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}
