use serde::Serialize;

use super::sampler::{map_samples, MonteCarlo, PnWalker, StatReport, OP_LIL, OP_SUMS};
use super::test_function::to_f64;
use super::{e_f, TestFunction};
use crate::arith::CompensatedSum;
use crate::error::{Error, Result};
use crate::stats::{ks_critical, ks_one_sample, ks_one_sample_lattice, ks_two_sample, normal_cdf, sorted, variance_with_se};

/// `sum_{n=1}^N f(P_n)` for each function and each sample: `sums[f][sample]`.
/// All functions are evaluated on the same `alpha` draws; they may live on
/// different moduli.
pub fn pn_sums(fs: &[&TestFunction], n: usize, mc: &MonteCarlo) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let walkers: Vec<PnWalker> = fs.iter().map(|f| PnWalker::new(f.group())).collect();
    let per_sample = map_samples(mc, OP_SUMS, n, |q| {
        fs.iter()
            .zip(&walkers)
            .map(|(f, w)| {
                let vals = f.values_f64();
                w.walk(q).map(|i| vals[i]).collect::<CompensatedSum>().value()
            })
            .collect::<Vec<f64>>()
    })?;
    Ok((0..fs.len())
        .map(|j| per_sample.iter().map(|s| s[j]).collect())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub n: usize,
    pub samples: usize,
    /// `Var(sum_{n <= N} f(P_n)) / N`.
    pub estimate: f64,
    pub std_error: f64,
}

pub fn variance_from_sums(sums: &[f64], n: usize) -> VarianceEstimate {
    let (v, se) = variance_with_se(sums);
    VarianceEstimate {
        n,
        samples: sums.len(),
        estimate: v / n as f64,
        std_error: se / n as f64,
    }
}

pub fn empirical_variance(f: &TestFunction, n: usize, mc: &MonteCarlo) -> Result<VarianceEstimate> {
    let sums = pn_sums(&[f], n, mc)?;
    Ok(variance_from_sums(&sums[0], n))
}

/// `(S_N - E_f N) / sqrt(N)` per sample.
pub fn normalized(f: &TestFunction, sums: &[f64], n: usize) -> Vec<f64> {
    let center = to_f64(&e_f(f)) * n as f64;
    let root = (n as f64).sqrt();
    sums.iter().map(|s| (s - center) / root).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CltMode {
    Ks,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub mode: CltMode,
    pub n: usize,
    pub samples: usize,
    pub sigma_sq: f64,
    /// KS distance (KS mode) or the sample variance of the normalised sums
    /// (degenerate mode).
    pub estimate: f64,
    pub threshold: f64,
    /// Exact KS critical value at level 0.01 for this sample size.
    pub critical_value: f64,
    pub pass: bool,
}

impl CltReport {
    pub fn to_stat(&self) -> StatReport {
        StatReport {
            statistic: match self.mode {
                CltMode::Ks => "clt_ks_distance".into(),
                CltMode::Degenerate => "clt_degenerate_variance".into(),
            },
            n: self.n,
            samples: self.samples,
            estimate: self.estimate,
            std_error: None,
            expected: 0.0,
            tolerance: self.threshold,
            pass: self.pass,
        }
    }
}

/// KS comparison of the normalised sums with `N(0, sigma_sq)`.
///
/// When `sigma_sq < 3 sigma_se` the limit is treated as degenerate and the
/// check becomes `Var((S_N - E_f N)/sqrt N) <= 10 log(N+1) / N`.
pub fn clt_from_sums(
    f: &TestFunction,
    sums: &[f64],
    n: usize,
    sigma_sq: f64,
    sigma_se: f64,
    threshold: f64,
) -> CltReport {
    let z = normalized(f, sums, n);
    let samples = z.len();
    let critical_value = ks_critical(samples, 0.01);
    if sigma_sq < 3.0 * sigma_se || sigma_sq <= 0.0 {
        let (v, _) = if samples > 1 { variance_with_se(&z) } else { (0.0, 0.0) };
        let limit = 10.0 * ((n + 1) as f64).ln() / n as f64;
        return CltReport {
            mode: CltMode::Degenerate,
            n,
            samples,
            sigma_sq,
            estimate: v,
            threshold: limit,
            critical_value,
            pass: v <= limit,
        };
    }
    let sigma = sigma_sq.sqrt();
    let z = sorted(z);
    let d = match f.lattice_step() {
        Some(step) => {
            let delta = to_f64(&step) / (n as f64).sqrt();
            ks_one_sample_lattice(&z, delta, |x| normal_cdf(x, sigma))
        }
        None => ks_one_sample(&z, |x| normal_cdf(x, sigma)),
    };
    CltReport {
        mode: CltMode::Ks,
        n,
        samples,
        sigma_sq,
        estimate: d,
        threshold,
        critical_value,
        pass: d < threshold,
    }
}

pub fn clt_check(
    f: &TestFunction,
    n: usize,
    mc: &MonteCarlo,
    sigma_sq: f64,
    sigma_se: f64,
    threshold: f64,
) -> Result<CltReport> {
    let sums = pn_sums(&[f], n, mc)?;
    Ok(clt_from_sums(f, &sums[0], n, sigma_sq, sigma_se, threshold))
}

/// Two-sample KS distance between the normalised sums of two runs.
pub fn cross_ks(f: &TestFunction, a: &[f64], b: &[f64], n: usize) -> f64 {
    ks_two_sample(&sorted(normalized(f, a, n)), &sorted(normalized(f, b, n)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilRow {
    pub sample: usize,
    pub n: usize,
    pub ratio: f64,
    pub running_sup: f64,
}

/// Checkpoints `16 = N_0 < N_1 < ... <= N_max`, ten per decade.
pub fn lil_checkpoints(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..)
        .map(|k| (16.0 * 10f64.powf(k as f64 / 10.0)).round() as usize)
        .take_while(|&n| n < n_max)
        .collect();
    out.dedup();
    out.push(n_max);
    out
}

/// `(S_N - E_f N) / sqrt(2 N log log N)` along each sample path, with its
/// running supremum over `16 <= n <= N`, reported at [`lil_checkpoints`].
pub fn lil_trace(f: &TestFunction, n_max: usize, mc: &MonteCarlo) -> Result<Vec<LilRow>> {
    if n_max < 1000 {
        return Err(Error::InvalidParameter(format!("N_max = {n_max} below 1000")));
    }
    let ef = to_f64(&e_f(f));
    let walker = PnWalker::new(f.group());
    let checkpoints = lil_checkpoints(n_max);
    let per_sample = map_samples(mc, OP_LIL, n_max, |q| {
        let vals = f.values_f64();
        let mut s = CompensatedSum::new();
        let mut sup = f64::NEG_INFINITY;
        let mut rows = Vec::with_capacity(checkpoints.len());
        let mut next = checkpoints.iter().peekable();
        for (i, g) in walker.walk(q).enumerate() {
            let n = i + 1;
            s.add(vals[g] - ef);
            if n < 16 {
                continue;
            }
            let nf = n as f64;
            let ratio = s.value() / (2.0 * nf * nf.ln().ln()).sqrt();
            sup = sup.max(ratio);
            if next.peek() == Some(&&n) {
                next.next();
                rows.push((n, ratio, sup));
            }
        }
        rows
    })?;
    Ok(per_sample
        .into_iter()
        .enumerate()
        .flat_map(|(sample, rows)| {
            rows.into_iter().map(move |(n, ratio, running_sup)| LilRow {
                sample,
                n,
                ratio,
                running_sup,
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::cf::Uniform;
    use crate::zmod::{Group, ModMatrix, Modulus};
    use std::sync::Arc;

    fn g2() -> Arc<Group> {
        Arc::new(Group::new(&Modulus::new(2).unwrap()).unwrap())
    }

    #[test]
    fn constant_has_zero_variance_and_degenerate_clt() {
        let f = TestFunction::constant(g2(), BigRational::from_integer(1.into()));
        let mc = MonteCarlo::gauss(50, 1);
        let v = empirical_variance(&f, 200, &mc).unwrap();
        assert_eq!(v.estimate, 0.0);
        let r = clt_check(&f, 200, &mc, 0.0, 0.0, 0.02).unwrap();
        assert_eq!(r.mode, CltMode::Degenerate);
        assert!(r.pass);
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn sums_agree_with_direct_product() {
        let g = g2();
        let f = TestFunction::indicator(g.clone(), &ModMatrix::identity(2)).unwrap();
        let mc = MonteCarlo::gauss(4, 8);
        let sums = pn_sums(&[&f], 50, &mc).unwrap();
        let qs = map_samples(&mc, OP_SUMS, 50, |q| q.to_vec()).unwrap();
        for (s, q) in sums[0].iter().zip(&qs) {
            let mut p = ModMatrix::identity(2);
            let mut c = 0.0;
            for &a in q {
                p = p.mul(&ModMatrix::h(a, 2));
                if p == ModMatrix::identity(2) {
                    c += 1.0;
                }
            }
            assert_eq!(*s, c);
        }
    }

    #[test]
    fn variance_is_stable_in_n() {
        let f = TestFunction::indicator(g2(), &ModMatrix::identity(2)).unwrap();
        let mc = MonteCarlo::gauss(3000, 5);
        let a = empirical_variance(&f, 300, &mc).unwrap();
        let b = empirical_variance(&f, 1500, &mc).unwrap();
        let comb = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.estimate - b.estimate).abs() < 4.0 * comb + 0.1 * b.estimate);
    }

    #[test]
    fn laws_agree_on_normalised_sums() {
        let f = TestFunction::indicator(g2(), &ModMatrix::identity(2)).unwrap();
        let n = 500;
        let a = pn_sums(&[&f], n, &MonteCarlo::gauss(2000, 2)).unwrap();
        let b = pn_sums(&[&f], n, &MonteCarlo::new(2000, 2, Arc::new(Uniform))).unwrap();
        let d = cross_ks(&f, &a[0], &b[0], n);
        assert!(d < 0.06, "{d}");
    }

    #[test]
    fn lil_constant_is_zero() {
        let f = TestFunction::constant(g2(), BigRational::from_integer(1.into()));
        let rows = lil_trace(&f, 1000, &MonteCarlo::gauss(3, 3)).unwrap();
        assert!(rows.iter().all(|r| r.ratio == 0.0 && r.running_sup == 0.0));
        assert_eq!(rows.last().unwrap().n, 1000);
        assert!(lil_trace(&f, 999, &MonteCarlo::gauss(3, 3)).is_err());
    }

    #[test]
    fn checkpoints_are_increasing() {
        let c = lil_checkpoints(100_000);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(c[0], 16);
        assert_eq!(*c.last().unwrap(), 100_000);
    }
}
