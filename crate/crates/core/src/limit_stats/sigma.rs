use serde::Serialize;

use super::sampler::{map_samples, MonteCarlo, PnWalker, OP_SIGMA};
use super::TestFunction;
use crate::error::{Error, Result};
use crate::gauss_kuzmin::pl_distribution_bracket;
use crate::stats::{mean, sample_variance};
use crate::zmod::Group;

/// Largest group order for which the correlation kernel (`|G|^2` products)
/// is tabulated.
pub const SIGMA_GROUP_CAP: usize = 5000;

#[derive(Debug, Clone)]
pub struct SigmaConfig {
    /// Truncation `R` of the series.
    pub r: usize,
    /// Terms `n <= ell_exact` come from cylinder brackets.
    pub ell_exact: usize,
    /// Quotient bound for the bracket of `P_n`, `n = 1, 2, 3, ...`.
    pub b_max: Vec<u64>,
    /// Monte Carlo for the terms `ell_exact < n <= R`.
    pub mc: MonteCarlo,
}

impl SigmaConfig {
    pub fn new(mc: MonteCarlo) -> Self {
        SigmaConfig {
            r: 30,
            ell_exact: 3,
            b_max: vec![1_000_000, 5_000, 400],
            mc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermMethod {
    Bracket,
    MonteCarlo,
}

/// `c_n = E fbar(U_1) fbar(U_1 P_n) + E fbar(U_-1) fbar(U_-1 P_n)`.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesTerm {
    pub n: usize,
    pub value: f64,
    /// Bracket half-width, or one Monte Carlo standard error.
    pub error: f64,
    pub method: TermMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaEstimate {
    pub sigma_sq: f64,
    pub r: usize,
    /// `(E fbar(U_1)^2 + E fbar(U_-1)^2) / 2`, exact up to rounding.
    pub diagonal: f64,
    pub terms: Vec<SeriesTerm>,
    /// Standard error of the Monte Carlo part (all its terms jointly).
    pub std_error: f64,
    /// Sum of bracket half-widths: a deterministic bound.
    pub bracket_error: f64,
    /// Bound on `sum_{n > R} |c_n|` from the observed geometric decay.
    pub tail_bound: f64,
    pub decay_ratio: f64,
    /// False when significant terms fail to decay.
    pub terms_decay: bool,
}

impl SigmaEstimate {
    /// Standard error and deterministic error bounds combined in quadrature.
    pub fn total_error(&self) -> f64 {
        (self.std_error.powi(2) + (self.bracket_error + self.tail_bound).powi(2)).sqrt()
    }
}

/// `K(h) = (w / |G_1|) sum_{g in G} fbar(g) fbar(g h)` with `w = 2` when the
/// two cosets coincide, so that `c_n = E K(P_n)`.
pub(crate) struct Kernel {
    pub k: Vec<f64>,
    pub diagonal: f64,
}

pub(crate) fn kernel(f: &TestFunction) -> Result<Kernel> {
    let group: &Group = f.group();
    let n = group.len();
    if n > SIGMA_GROUP_CAP {
        return Err(Error::InvalidParameter(format!(
            "group order {n} exceeds the correlation-kernel cap {SIGMA_GROUP_CAP}"
        )));
    }
    let w = if group.modulus().m() == 2 { 2.0 } else { 1.0 };
    let g1 = group.g1_len() as f64;
    let fbar: Vec<f64> = (0..n).map(|i| f.fbar(i)).collect();
    let support: Vec<usize> = (0..n).filter(|&i| fbar[i] != 0.0).collect();
    let k = (0..n)
        .map(|h| {
            let hm = group.get(h);
            let s: f64 = support
                .iter()
                .map(|&g| {
                    let gh = group.index_of(&group.get(g).mul(&hm)).expect("closed");
                    fbar[g] * fbar[gh]
                })
                .sum();
            w * s / g1
        })
        .collect();
    let diagonal = w / 2.0 * fbar.iter().map(|x| x * x).sum::<f64>() / g1;
    Ok(Kernel { k, diagonal })
}

/// The series for `sigma_f^2` truncated at `R`, with bracketed low terms,
/// Monte Carlo high terms and a geometric tail bound.
pub fn sigma_f(f: &TestFunction, cfg: &SigmaConfig) -> Result<SigmaEstimate> {
    if cfg.r == 0 {
        return Err(Error::InvalidParameter("truncation R must be at least 1".into()));
    }
    let group = f.group().clone();
    let kern = kernel(f)?;
    let mut terms = Vec::with_capacity(cfg.r);
    if f.is_coset_constant() {
        return Ok(SigmaEstimate {
            sigma_sq: 0.0,
            r: cfg.r,
            diagonal: 0.0,
            terms: (1..=cfg.r)
                .map(|n| SeriesTerm {
                    n,
                    value: 0.0,
                    error: 0.0,
                    method: TermMethod::Bracket,
                })
                .collect(),
            std_error: 0.0,
            bracket_error: 0.0,
            tail_bound: 0.0,
            decay_ratio: 0.0,
            terms_decay: true,
        });
    }
    let exact_upto = cfg.ell_exact.min(cfg.r);
    let mut bracket_error = 0.0;
    for n in 1..=exact_upto {
        let b_max = *cfg.b_max.get(n - 1).ok_or_else(|| {
            Error::InvalidParameter(format!("no bracket quotient bound configured for n = {n}"))
        })?;
        let br = pl_distribution_bracket(group.modulus(), n, b_max)?;
        let unit = 2f64.powi(-64);
        let mut base = 0.0;
        let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for e in &br.brackets {
            let h = group.index_of(&e.element).expect("bracket element in G");
            base += e.lower_units as f64 * unit * kern.k[h];
            kmin = kmin.min(kern.k[h]);
            kmax = kmax.max(kern.k[h]);
        }
        // Uncovered mass t_h >= 0 with sum t_h = leftover lands somewhere in
        // the class, so c_n lies in base + leftover * [min K, max K].
        let left = br.leftover_units as f64 * unit;
        let lo = base + left * kmin;
        let hi = base + left * kmax;
        let err = 0.5 * (hi - lo) + 1e-15;
        bracket_error += err;
        terms.push(SeriesTerm {
            n,
            value: 0.5 * (lo + hi),
            error: err,
            method: TermMethod::Bracket,
        });
    }
    let mut std_error = 0.0;
    if cfg.r > exact_upto {
        let walker = PnWalker::new(&group);
        let k = &kern.k;
        let per_sample: Vec<Vec<f64>> = map_samples(&cfg.mc, OP_SIGMA, cfg.r, |q| {
            walker
                .walk(q)
                .skip(exact_upto)
                .map(|h| k[h])
                .collect()
        })?;
        let count = per_sample.len() as f64;
        for (j, n) in (exact_upto + 1..=cfg.r).enumerate() {
            let col: Vec<f64> = per_sample.iter().map(|s| s[j]).collect();
            terms.push(SeriesTerm {
                n,
                value: mean(&col),
                error: (sample_variance(&col) / count).sqrt(),
                method: TermMethod::MonteCarlo,
            });
        }
        let sums: Vec<f64> = per_sample.iter().map(|s| s.iter().sum()).collect();
        std_error = (sample_variance(&sums) / count).sqrt();
    }
    let (decay_ratio, terms_decay) = decay(&terms);
    let last = terms.last().expect("R >= 1");
    let tail_bound = (last.value.abs() + 2.0 * last.error) * decay_ratio / (1.0 - decay_ratio);
    let sigma_sq = kern.diagonal + terms.iter().map(|t| t.value).sum::<f64>();
    Ok(SigmaEstimate {
        sigma_sq,
        r: cfg.r,
        diagonal: kern.diagonal,
        terms,
        std_error,
        bracket_error,
        tail_bound,
        decay_ratio,
        terms_decay,
    })
}

/// Geometric rate through the terms that stand out of their errors
/// (`|c_n| > 3 err`), clamped to `[0.05, 0.95]`.
fn decay(terms: &[SeriesTerm]) -> (f64, bool) {
    let sig: Vec<&SeriesTerm> = terms
        .iter()
        .filter(|t| t.value.abs() > 3.0 * t.error)
        .collect();
    if sig.len() < 2 {
        return (0.5, true);
    }
    let (a, b) = (sig[0], sig[sig.len() - 1]);
    let ratio = (b.value.abs() / a.value.abs()).powf(1.0 / (b.n - a.n) as f64);
    (ratio.clamp(0.05, 0.95), ratio < 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::gauss_kuzmin::{transfer_iterate, TransferConfig};
    use crate::limit_stats::TestFunction;
    use crate::zmod::{ModMatrix, Modulus};
    use std::sync::Arc;

    fn quick(mc_samples: usize) -> SigmaConfig {
        SigmaConfig {
            r: 12,
            ell_exact: 3,
            b_max: vec![100_000, 1_000, 150],
            mc: MonteCarlo::gauss(mc_samples, 4),
        }
    }

    #[test]
    fn constant_function_has_zero_sigma() {
        let g = Arc::new(Group::new(&Modulus::new(3).unwrap()).unwrap());
        let f = TestFunction::constant(g, BigRational::from_integer(2.into()));
        let s = sigma_f(&f, &quick(10)).unwrap();
        assert_eq!(s.sigma_sq, 0.0);
    }

    /// Independent route: `c_n = sum_h mu_Gauss(P_n = h) K(h)` with the law
    /// of `P_n` from the transfer iteration started at the Gauss density.
    fn sigma_via_transfer(f: &TestFunction, r: usize) -> f64 {
        let group = f.group();
        let kern = kernel(f).unwrap();
        let grids = transfer_iterate(
            group.modulus(),
            &|x| 1.0 / (std::f64::consts::LN_2 * (1.0 + x)),
            r,
            TransferConfig::default(),
        )
        .unwrap();
        let mut s = kern.diagonal;
        for grid in &grids[1..] {
            let mass = grid.class_masses();
            for (h, mu) in mass {
                s += mu * kern.k[h];
            }
        }
        s
    }

    #[test]
    fn indicator_m2_agrees_with_transfer_route() {
        let g = Arc::new(Group::new(&Modulus::new(2).unwrap()).unwrap());
        let f = TestFunction::indicator(g, &ModMatrix::identity(2)).unwrap();
        let est = sigma_f(&f, &quick(20_000)).unwrap();
        let oracle = sigma_via_transfer(&f, 40);
        assert!(est.sigma_sq > 0.0);
        assert!(
            (est.sigma_sq - oracle).abs() < 4.0 * est.total_error() + 1e-5,
            "{} vs {oracle} (err {})",
            est.sigma_sq,
            est.total_error()
        );
        assert!(est.terms_decay);
    }

    #[test]
    fn kernel_averages_to_zero_on_each_class() {
        let g = Arc::new(Group::new(&Modulus::new(3).unwrap()).unwrap());
        let f = TestFunction::indicator(g.clone(), &ModMatrix::new(3, 0, 1, 1, 0)).unwrap();
        let k = kernel(&f).unwrap();
        for parity in 0..2 {
            let s: f64 = g.class_range(parity).map(|h| k.k[h]).sum();
            assert!(s.abs() < 1e-12);
        }
    }
}
