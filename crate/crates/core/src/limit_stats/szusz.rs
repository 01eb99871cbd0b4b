use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::sampler::{map_samples, MonteCarlo, PnWalker, OP_SZUSZ};
use super::test_function::to_f64;
use crate::error::{Error, Result};
use crate::stats::{mean, sample_variance};
use crate::zmod::{nu_table, Group, Modulus, VSet};

/// Largest `N * samples` accepted by [`szusz_frequencies`].
pub const SZUSZ_BUDGET: u128 = 20_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SzuszTarget {
    /// `q_n mod m` against `nu`.
    QModM,
    /// `p_n mod m` against `nu`.
    PModM,
    /// `(p_n, q_n) mod m` against the uniform law on `V`.
    Pair,
    /// `P_n` against the uniform law on `G`.
    Matrix,
}

impl FromStr for SzuszTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "q_mod_m" => Ok(SzuszTarget::QModM),
            "p" | "p_mod_m" => Ok(SzuszTarget::PModM),
            "pair" => Ok(SzuszTarget::Pair),
            "matrix" => Ok(SzuszTarget::Matrix),
            other => Err(Error::InvalidParameter(format!("unknown frequency target {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SzuszCell {
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub expected: f64,
    /// `num/den`.
    pub expected_exact: String,
    /// `(estimate - expected) / std_error`.
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SzuszReport {
    pub m: u32,
    pub n: usize,
    pub samples: usize,
    pub target: SzuszTarget,
    pub cells: Vec<SzuszCell>,
    pub max_abs_z: f64,
    /// Pass threshold in standard errors, applied to all cells at once.
    pub threshold: f64,
    pub pass: bool,
}

pub const SZUSZ_THRESHOLD: f64 = 4.0;

/// Frequencies of `q_n mod m`, `p_n mod m`, `(p_n, q_n) mod m` or `P_n` over
/// `1 <= n <= N`, averaged over independent samples.
///
/// The standard error of a cell is the spread of its per-sample frequency
/// across samples, so dependence along one path is accounted for.
pub fn szusz_frequencies(m: &Modulus, n: usize, mc: &MonteCarlo, target: SzuszTarget) -> Result<SzuszReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let required = n as u128 * mc.samples as u128;
    if required > SZUSZ_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: SZUSZ_BUDGET,
        });
    }
    let group = Group::new(m)?;
    let walker = PnWalker::new(&group);
    let mm = m.m() as usize;
    let (labels, expected): (Vec<String>, Vec<BigRational>) = match target {
        SzuszTarget::QModM | SzuszTarget::PModM => {
            let nu = nu_table(m);
            (0..mm).map(|a| (a.to_string(), nu.weight(a as u32).clone())).unzip()
        }
        SzuszTarget::Pair => {
            let v = VSet::new(m);
            let w = BigRational::new(1.into(), BigInt::from(v.len()));
            (0..mm * mm)
                .map(|c| {
                    let (a, b) = ((c / mm) as u32, (c % mm) as u32);
                    let e = if v.contains(a, b) { w.clone() } else { BigRational::from_integer(0.into()) };
                    (format!("({a},{b})"), e)
                })
                .unzip()
        }
        SzuszTarget::Matrix => {
            let w = BigRational::new(1.into(), BigInt::from(group.len()));
            group.elements().iter().map(|g| (g.to_string(), w.clone())).unzip()
        }
    };
    let cells = labels.len();
    let cell_of = |i: usize| -> usize {
        let [_, b, _, d] = group.get(i).entries();
        match target {
            SzuszTarget::QModM => d as usize,
            SzuszTarget::PModM => b as usize,
            SzuszTarget::Pair => b as usize * mm + d as usize,
            SzuszTarget::Matrix => i,
        }
    };
    let map: Vec<usize> = (0..group.len()).map(cell_of).collect();
    let freqs = map_samples(mc, OP_SZUSZ, n, |q| {
        let mut counts = vec![0u64; cells];
        for i in walker.walk(q) {
            counts[map[i]] += 1;
        }
        counts.into_iter().map(|c| c as f64 / n as f64).collect::<Vec<f64>>()
    })?;
    let samples = freqs.len();
    let mut max_abs_z: f64 = 0.0;
    let cells: Vec<SzuszCell> = (0..cells)
        .map(|c| {
            let col: Vec<f64> = freqs.iter().map(|f| f[c]).collect();
            let est = mean(&col);
            let se = if samples > 1 { (sample_variance(&col) / samples as f64).sqrt() } else { 0.0 };
            let exp = to_f64(&expected[c]);
            let z = if est == exp {
                0.0
            } else if se > 0.0 {
                (est - exp) / se
            } else {
                f64::INFINITY
            };
            max_abs_z = max_abs_z.max(z.abs());
            SzuszCell {
                label: labels[c].clone(),
                estimate: est,
                std_error: se,
                expected: exp,
                expected_exact: format!("{}/{}", expected[c].numer(), expected[c].denom()),
                z,
            }
        })
        .collect();
    Ok(SzuszReport {
        m: m.m(),
        n,
        samples,
        target,
        cells,
        max_abs_z,
        threshold: SZUSZ_THRESHOLD,
        pass: max_abs_z <= SZUSZ_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_third_of_denominators_are_even() {
        let m = Modulus::new(2).unwrap();
        let r = szusz_frequencies(&m, 2000, &MonteCarlo::gauss(300, 11), SzuszTarget::QModM).unwrap();
        assert_eq!(r.cells[0].expected_exact, "1/3");
        assert!(r.pass, "{:?}", r.cells);
        assert!((r.cells[0].estimate - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn parity_pairs_avoid_even_even() {
        let m = Modulus::new(2).unwrap();
        let r = szusz_frequencies(&m, 1000, &MonteCarlo::gauss(200, 12), SzuszTarget::Pair).unwrap();
        let ee = &r.cells[0];
        assert_eq!(ee.label, "(0,0)");
        assert_eq!(ee.estimate, 0.0);
        assert_eq!(ee.expected, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn matrix_target_m3() {
        let m = Modulus::new(3).unwrap();
        let r = szusz_frequencies(&m, 1000, &MonteCarlo::gauss(300, 13), SzuszTarget::Matrix).unwrap();
        assert_eq!(r.cells.len(), 48);
        assert!(r.cells.iter().all(|c| c.expected_exact == "1/48"));
        assert!(r.pass, "max z {}", r.max_abs_z);
    }

    #[test]
    fn parse_targets() {
        assert_eq!("pair".parse::<SzuszTarget>().unwrap(), SzuszTarget::Pair);
        assert!("x".parse::<SzuszTarget>().is_err());
    }
}
