use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::kernel::{f_of_u, FMode};
use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::zmod::{nu_table, Modulus};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `{t}(1 - {t})` for rational `t`.
fn wedge(t: &BigRational) -> BigRational {
    let f = t - t.floor();
    &f * (BigRational::one() - &f)
}

fn hp(r: &BigRational) -> HpReal {
    HpReal::from_ratio(r.numer(), r.denom())
}

/// `F(t) = {t}(1 - {t}) / 3`, exactly.
pub fn f_exact(t: &BigRational) -> BigRational {
    wedge(t) / BigInt::from(3)
}

/// `sum_a nu_a {a/m}(1 - {a/m})`, exactly.
pub fn identity_sixth(m: &Modulus) -> BigRational {
    let nu = nu_table(m);
    let mm = m.m() as i64;
    (0..mm)
        .map(|a| nu.weight(a as u32) * wedge(&rat(a, mm)))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

/// Rotation number for Kesten's variance formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KestenR {
    Rational { l: i64, m: i64 },
    Irrational,
}

#[derive(Debug, Clone, Serialize)]
pub struct KestenSigma {
    /// `l/m` in lowest terms, or `irrational`.
    pub r: String,
    /// `sum_a nu_a F(a l / m)` or `int_0^1 F`, as `num/den`.
    pub weighted_sum: String,
    pub value: f64,
    pub expected: f64,
    pub abs_error: f64,
}

/// `(6/pi) sum_a nu_a F(a l/m)` for rational `r = l/m`, `(6/pi) int_0^1 F`
/// otherwise; both equal `1/(3 pi)`.
pub fn sigma_kesten(r: &KestenR) -> Result<KestenSigma> {
    let (label, s) = match *r {
        KestenR::Rational { l, m } => {
            if m <= 0 || l <= 0 || l >= m {
                return Err(Error::InvalidParameter(format!("r = {l}/{m} is not in (0, 1)")));
            }
            let g = l.gcd(&m);
            let (l, m) = (l / g, m / g);
            let modulus = Modulus::new(m as u64)?;
            let nu = nu_table(&modulus);
            let s = (0..m)
                .map(|a| nu.weight(a as u32) * f_exact(&rat(a * l, m)))
                .fold(BigRational::zero(), |acc, x| acc + x);
            (format!("{l}/{m}"), s)
        }
        KestenR::Irrational => {
            // int_0^1 (u - u^2) / 3 du
            let p = Poly1(vec![rat(0, 1), rat(1, 3), rat(-1, 3)]);
            ("irrational".to_string(), p.integrate(&rat(0, 1), &rat(1, 1)))
        }
    };
    let value = hp(&(&s * BigInt::from(6))).div(&HpReal::pi());
    let expected = HpReal::from_int(1).div(&HpReal::pi().mul_int(3));
    Ok(KestenSigma {
        r: label,
        weighted_sum: ratio_string(&s),
        value: value.to_f64(),
        expected: expected.to_f64(),
        abs_error: (value - expected).abs().to_f64(),
    })
}

pub(crate) fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Dense univariate polynomial, `c[i] x^i`.
#[derive(Debug, Clone)]
struct Poly1(Vec<BigRational>);

impl Poly1 {
    fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    fn antiderivative(&self) -> Poly1 {
        let mut out = vec![BigRational::zero()];
        out.extend(self.0.iter().enumerate().map(|(i, c)| c / BigInt::from(i + 1)));
        Poly1(out)
    }

    fn integrate(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }

    fn add_scaled(&mut self, other: &Poly1, k: &BigRational) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), BigRational::zero());
        }
        for (s, o) in self.0.iter_mut().zip(&other.0) {
            *s += o * k;
        }
    }

    fn mul(&self, other: &Poly1) -> Poly1 {
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1(out)
    }
}

/// `c[i][j] x^i y^j`.
struct Poly2(Vec<Vec<BigRational>>);

impl Poly2 {
    /// `int_{lo(x)}^{hi(x)} p(x, y) dy` for linear `lo`, `hi`, as a
    /// polynomial in `x`.
    fn integrate_y(&self, lo: &Poly1, hi: &Poly1) -> Poly1 {
        let mut out = Poly1(vec![BigRational::zero()]);
        for (i, row) in self.0.iter().enumerate() {
            let mut xi = vec![BigRational::zero(); i + 1];
            xi[i] = BigRational::one();
            let xi = Poly1(xi);
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // c x^i (hi^{j+1} - lo^{j+1}) / (j+1)
                let (mut ph, mut pl) = (Poly1(vec![BigRational::one()]), Poly1(vec![BigRational::one()]));
                for _ in 0..=j {
                    ph = ph.mul(hi);
                    pl = pl.mul(lo);
                }
                let k = c / BigInt::from(j + 1);
                out.add_scaled(&xi.mul(&ph), &k);
                out.add_scaled(&xi.mul(&pl), &-k);
            }
        }
        out
    }
}

/// `int_0^1 int_0^1 |x^2 - x - y^2 + y| dx dy`, exactly.
///
/// The integrand is `(x - y)(x + y - 1)`; the diagonals cut the square into
/// four triangles of constant sign, each split at `x = 1/2` into regions
/// `lo(x) <= y <= hi(x)`.
pub fn sigma_prime_integral() -> BigRational {
    let p = Poly2(vec![
        vec![rat(0, 1), rat(1, 1), rat(-1, 1)],
        vec![rat(-1, 1)],
        vec![rat(1, 1)],
    ]);
    let lin = |c0: i64, c1: i64| Poly1(vec![rat(c0, 1), rat(c1, 1)]);
    let (zero, half, one) = (rat(0, 1), rat(1, 2), rat(1, 1));
    // (x range, lo, hi, sign)
    let pieces = [
        // bottom: y below both diagonals
        (&zero, &half, lin(0, 0), lin(0, 1), -1),
        (&half, &one, lin(0, 0), lin(1, -1), -1),
        // top
        (&zero, &half, lin(1, -1), lin(1, 0), -1),
        (&half, &one, lin(0, 1), lin(1, 0), -1),
        // left
        (&zero, &half, lin(0, 1), lin(1, -1), 1),
        // right
        (&half, &one, lin(1, -1), lin(0, 1), 1),
    ];
    pieces
        .iter()
        .map(|(a, b, lo, hi, sign)| p.integrate_y(lo, hi).integrate(a, b) * BigInt::from(*sign))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaPrime {
    /// The double integral as `num/den`.
    pub integral: String,
    pub value: f64,
    pub expected: f64,
    pub abs_error: f64,
}

/// `(3/pi) int int |x^2 - x - y^2 + y|`, to be compared with `1/(4 pi)`.
pub fn sigma_prime() -> SigmaPrime {
    let i = sigma_prime_integral();
    let value = hp(&(&i * BigInt::from(3))).div(&HpReal::pi());
    let expected = HpReal::from_int(1).div(&HpReal::pi().mul_int(4));
    SigmaPrime {
        integral: ratio_string(&i),
        value: value.to_f64(),
        expected: expected.to_f64(),
        abs_error: (value - expected).abs().to_f64(),
    }
}

#[derive(Debug, Clone)]
pub struct ThetaValue {
    pub m: Modulus,
    pub theta_m: HpReal,
    pub c_r: HpReal,
}

/// `theta_m = sum_a nu_a w_a log w_a` with `w_a = {a/m}(1 - {a/m})` and
/// `0 log 0 = 0`, and `c(r) = (6 theta_m + gamma + log 2 pi) / pi^2`.
pub fn theta_and_c(m: &Modulus) -> ThetaValue {
    let nu = nu_table(m);
    let mm = m.m() as i64;
    let theta = (1..mm).fold(HpReal::zero(), |acc, a| {
        let w = wedge(&rat(a, mm));
        let term = hp(&(nu.weight(a as u32) * &w)) * HpReal::ln_ratio(w.numer(), w.denom());
        acc + term
    });
    let pi = HpReal::pi();
    let two_pi = pi.mul_int(2);
    let c = (theta.mul_int(6) + HpReal::euler_gamma() + two_pi.ln()).div(&(pi.clone() * pi));
    ThetaValue {
        m: m.clone(),
        theta_m: theta,
        c_r: c,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    /// Closed form, or an independent double-precision evaluation when no
    /// closed form is known.
    pub expected: f64,
    pub abs_error: f64,
    /// Exact rational value, `num/den`, where one exists.
    pub exact: Option<String>,
    /// 50 significant digits for the high-precision entries.
    pub digits: Option<String>,
}

impl ConstantRow {
    fn new(name: &str, value: f64, expected: f64) -> Self {
        ConstantRow {
            name: name.to_string(),
            value,
            expected,
            abs_error: (value - expected).abs(),
            exact: None,
            digits: None,
        }
    }
}

/// Every constant for modulus `m` (rotation number `1/m`), each with its
/// expected value.
pub fn constants_table(m: &Modulus) -> Result<Vec<ConstantRow>> {
    let mm = m.m();
    let pi = std::f64::consts::PI;
    let mut rows = Vec::new();

    let six = identity_sixth(m);
    let mut row = ConstantRow::new(&format!("identity_sixth[m={mm}]"), six.to_f64().unwrap_or(f64::NAN), 1.0 / 6.0);
    row.abs_error = (&six - rat(1, 6)).abs().to_f64().unwrap_or(f64::NAN);
    row.exact = Some(ratio_string(&six));
    rows.push(row);

    rows.push(ConstantRow::new("F(1/2)", f_of_u(0.5, FMode::Closed), 1.0 / 12.0));
    rows.push(ConstantRow::new(
        "F(1/2)[quadrature 512]",
        f_of_u(0.5, FMode::Quadrature(512)),
        1.0 / 12.0,
    ));

    for r in [KestenR::Irrational, KestenR::Rational { l: 1, m: mm as i64 }] {
        let s = sigma_kesten(&r)?;
        let mut row = ConstantRow::new(&format!("sigma[r={}]", s.r), s.value, s.expected);
        row.abs_error = s.abs_error;
        row.exact = Some(s.weighted_sum);
        rows.push(row);
    }

    let sp = sigma_prime();
    let mut row = ConstantRow::new("sigma_prime", sp.value, sp.expected);
    row.abs_error = sp.abs_error;
    row.exact = Some(sp.integral);
    rows.push(row);

    let tv = theta_and_c(m);
    let nu = nu_table(m).weights_f64();
    let theta_f64: f64 = (1..mm)
        .map(|a| {
            let t = a as f64 / mm as f64;
            let w = t * (1.0 - t);
            nu[a as usize] * w * w.ln()
        })
        .sum();
    let (g, l2p) = (0.577_215_664_901_532_9_f64, (2.0 * pi).ln());
    let theta_expected = if mm == 2 { -std::f64::consts::LN_2 / 3.0 } else { theta_f64 };
    let mut row = ConstantRow::new(&format!("theta[m={mm}]"), tv.theta_m.to_f64(), theta_expected);
    row.digits = Some(tv.theta_m.to_decimal(50));
    rows.push(row);
    let mut row = ConstantRow::new(
        &format!("c[r=1/{mm}]"),
        tv.c_r.to_f64(),
        (6.0 * theta_expected + g + l2p) / (pi * pi),
    );
    row.digits = Some(tv.c_r.to_decimal(50));
    rows.push(row);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::Group;

    fn md(m: u64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    #[test]
    fn identity_sixth_small_and_composite() {
        assert_eq!(identity_sixth(&md(2)), rat(1, 6));
        assert_eq!(identity_sixth(&md(12)), rat(1, 6));
        assert_eq!(identity_sixth(&md(210)), rat(1, 6));
        for m in 2..=200 {
            assert_eq!(identity_sixth(&md(m)), rat(1, 6), "m = {m}");
        }
    }

    /// Second route: average `{d/m}(1 - {d/m})` over the bottom-right entry of
    /// `G_1`.
    #[test]
    fn identity_sixth_via_group_average() {
        for m in [2u64, 3, 4, 6, 10] {
            let g = Group::new(&md(m)).unwrap();
            let s = g
                .class_range(0)
                .map(|i| wedge(&rat(g.get(i).entries()[3] as i64, m as i64)))
                .fold(BigRational::zero(), |acc, x| acc + x)
                / BigInt::from(g.g1_len());
            assert_eq!(s, rat(1, 6), "m = {m}");
        }
    }

    #[test]
    fn sigma_branches_agree() {
        let irr = sigma_kesten(&KestenR::Irrational).unwrap();
        assert_eq!(irr.weighted_sum, "1/18");
        assert!(irr.abs_error < 1e-10);
        let half = sigma_kesten(&KestenR::Rational { l: 1, m: 2 }).unwrap();
        assert_eq!(half.weighted_sum, "1/18");
        assert!((half.value - 1.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-15);
        let a = sigma_kesten(&KestenR::Rational { l: 3, m: 7 }).unwrap();
        let b = sigma_kesten(&KestenR::Rational { l: 1, m: 7 }).unwrap();
        assert_eq!(a.weighted_sum, b.weighted_sum);
        for m in 2..=50i64 {
            for l in (1..m).filter(|l| l.gcd(&m) == 1) {
                let s = sigma_kesten(&KestenR::Rational { l, m }).unwrap();
                assert!(s.abs_error < 1e-10 * s.expected, "{l}/{m}");
            }
        }
    }

    #[test]
    fn sigma_rejects_out_of_range() {
        for (l, m) in [(0, 3), (3, 3), (5, 3), (-1, 2), (1, 0)] {
            assert!(sigma_kesten(&KestenR::Rational { l, m }).is_err());
        }
        assert_eq!(sigma_kesten(&KestenR::Rational { l: 2, m: 4 }).unwrap().r, "1/2");
    }

    #[test]
    fn sigma_prime_integral_is_one_twelfth() {
        assert_eq!(sigma_prime_integral(), rat(1, 12));
        let s = sigma_prime();
        assert!((s.value - 0.0795775).abs() < 1e-7);
        assert!(s.abs_error < 1e-15);
        // Midpoint rule as a numerical cross-check.
        let n = 1000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                acc += (x * x - x - y * y + y).abs();
            }
        }
        assert!((acc * h * h - 1.0 / 12.0).abs() < 1e-5);
    }

    #[test]
    fn integrand_vanishes_on_diagonals() {
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let f = |x: f64, y: f64| x * x - x - y * y + y;
            assert!(f(x, x).abs() < 1e-15 && f(x, 1.0 - x).abs() < 1e-15);
        }
    }

    /// `exp` by Taylor series and `log` by Newton's method, in 256-bit fixed
    /// point; independent of the atanh series used by `HpReal`.
    fn ln_newton(num: i64, den: i64) -> Fixed256 {
        const B: u32 = 256;
        let one = BigInt::one() << B;
        let mul = |a: &BigInt, b: &BigInt| (a * b) >> B;
        let exp = |x: &BigInt| {
            // x in (-2, 0]: halve until small, then square back.
            let mut y = x.clone();
            let mut k = 0;
            while y.abs() > (&one >> 4) {
                y >>= 1;
                k += 1;
            }
            let mut term = one.clone();
            let mut sum = one.clone();
            for i in 1..80 {
                term = mul(&term, &y) / BigInt::from(i);
                sum += &term;
            }
            for _ in 0..k {
                sum = mul(&sum, &sum);
            }
            sum
        };
        let target = (BigInt::from(num) << B) / BigInt::from(den);
        let mut y = BigInt::from(((num as f64 / den as f64).ln() * 2f64.powi(52)) as i64) << (B - 52);
        for _ in 0..8 {
            let e = exp(&y);
            // y <- y + 2 (t - e) / (t + e)
            y += ((&target - &e) << (B + 1)) / (&target + &e);
        }
        Fixed256(y)
    }

    struct Fixed256(BigInt);

    #[test]
    fn theta_two_is_minus_log2_over_3() {
        let t = theta_and_c(&md(2));
        let expected = HpReal::ln2().div_int(3);
        assert!((t.theta_m.clone() + expected).abs().to_f64() < 1e-60);
        // 50 digits of log 2.
        let ln2 = HpReal::parse_decimal("0.69314718055994530941723212145817656807550013436025").unwrap();
        assert!(t.theta_m.agrees_to(&-(ln2.div_int(3)), 49));
    }

    #[test]
    fn theta_against_newton_logarithm() {
        for m in [3i64, 4, 5, 6, 12] {
            let nu = nu_table(&md(m as u64));
            let mut acc = BigInt::zero();
            let mut acc_hp = HpReal::zero();
            for a in 1..m {
                let w = wedge(&rat(a, m));
                let (n, d) = (w.numer().to_i64().unwrap(), w.denom().to_i64().unwrap());
                let Fixed256(l) = ln_newton(n, d);
                let c = nu.weight(a as u32) * &w;
                acc += (l * c.numer()) / c.denom();
                acc_hp = acc_hp + hp(&c) * HpReal::ln_ratio(w.numer(), w.denom());
            }
            let t = theta_and_c(&md(m as u64));
            let newton = HpReal::from_ratio(&acc, &(BigInt::one() << 256u32));
            assert!(t.theta_m.agrees_to(&newton, 50), "m = {m}");
            assert!(t.theta_m.is_negative());
        }
    }

    #[test]
    fn c_depends_only_on_denominator() {
        let t = theta_and_c(&md(2));
        let pi = std::f64::consts::PI;
        let c = (-2.0 * std::f64::consts::LN_2 + 0.5772156649015329 + (2.0 * pi).ln()) / (pi * pi);
        assert!((t.c_r.to_f64() - c).abs() < 1e-14);
    }

    #[test]
    fn table_rows_match_expectations() {
        for m in [2u64, 3, 7] {
            let rows = constants_table(&md(m)).unwrap();
            for r in &rows {
                let tol = if r.name.contains("quadrature") { 1e-4 } else { 1e-10 * r.expected.abs().max(1e-3) };
                assert!(r.abs_error <= tol, "{}: {} vs {}", r.name, r.value, r.expected);
            }
        }
    }
}
