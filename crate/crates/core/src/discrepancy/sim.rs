use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::One;
use rand::RngCore;
use serde::Serialize;

use super::birkhoff::{brute_maxmin_prefixes, brute_maxmin_words, BirkhoffConfig, LocalSum, RationalR};
use super::extreme::{scaled_discrepancy, sorted_points};
use super::rs::rs_maxmin;
use super::stable::{stable_cdf, StableLaw};
use crate::cf::expand_rational;
use crate::error::{Error, Result};
use crate::kesten::theta_and_c;
use crate::seeding::{par_map_indexed, stream_rng, Purpose};
use crate::stats::{cauchy_cdf, ks_one_sample, ks_one_sample_lattice, ks_two_sample, median, pearson, sorted};
use crate::zmod::Modulus;

pub const PURPOSE_CAUCHY: Purpose = Purpose(0x1000);
pub const PURPOSE_MAXMIN: Purpose = Purpose(0x1100);
pub const PURPOSE_RS: Purpose = Purpose(0x1200);
pub const PURPOSE_DN: Purpose = Purpose(0x1300);
pub const PURPOSE_STABLE: Purpose = Purpose(0x1400);

/// Kesten's normalising constant for indicator sums.
pub const SIGMA_KESTEN: f64 = 1.0 / (3.0 * PI);

/// A uniform 64-bit dyadic in `(0, 1)`, as its numerator over `2^64`.
fn word(rng: &mut dyn RngCore) -> u64 {
    loop {
        let w = rng.next_u64();
        if w != 0 {
            return w;
        }
    }
}

fn check_sizes(ns: &[u64], samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] < 3 {
        return Err(Error::InvalidParameter("N values must be increasing and at least 3".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchySample {
    pub sample: usize,
    pub n: u64,
    pub s: LocalSum,
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyRow {
    pub n: u64,
    /// KS distance with the half-step continuity correction: for fixed `N`
    /// the sums live on `Z - rN`, a lattice of spacing `1 / (sigma log N)`
    /// after normalisation.
    pub ks: f64,
    /// Plain KS distance against the continuous Cauchy CDF.
    pub ks_raw: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyReport {
    pub r: RationalR,
    pub samples: usize,
    pub sigma: f64,
    pub rows: Vec<CauchyRow>,
    /// KS distances do not increase along the `N` list.
    pub nonincreasing: bool,
    pub records: Vec<CauchySample>,
}

/// `S_{N,r}(alpha, beta) / (sigma log N)` for `(alpha, beta)` uniform on the
/// unit square, against the standard Cauchy law, at each `N` in `ns`.
pub fn cauchy_limit_sim(r: RationalR, ns: &[u64], samples: usize, seed: u64) -> Result<CauchyReport> {
    check_sizes(ns, samples)?;
    let n_max = *ns.last().expect("nonempty");
    let per_sample: Vec<Vec<i128>> = par_map_indexed(samples, |i| {
        let mut rng = stream_rng(seed, PURPOSE_CAUCHY, i as u64);
        let (a, b) = (word(&mut rng), rng.next_u64());
        let cfg = BirkhoffConfig::from_words(a, r, b).expect("valid words");
        let mut out = Vec::with_capacity(ns.len());
        let mut targets = ns.iter().peekable();
        for (k, s) in cfg.scan().take(n_max as usize).enumerate() {
            if targets.peek() == Some(&&(k as u64 + 1)) {
                out.push(s);
                targets.next();
            }
        }
        out
    });
    let mut rows = Vec::with_capacity(ns.len());
    let mut records = Vec::with_capacity(samples * ns.len());
    for (j, &n) in ns.iter().enumerate() {
        let scale = SIGMA_KESTEN * (n as f64).ln();
        let z: Vec<f64> = per_sample
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let s = LocalSum { num: s[j], m: r.m() };
                let normalized = s.to_f64() / scale;
                records.push(CauchySample {
                    sample: i,
                    n,
                    s,
                    normalized,
                });
                normalized
            })
            .collect();
        let z = sorted(z);
        rows.push(CauchyRow {
            n,
            ks: ks_one_sample_lattice(&z, 1.0 / scale, cauchy_cdf),
            ks_raw: ks_one_sample(&z, cauchy_cdf),
        });
    }
    let nonincreasing = rows.windows(2).all(|w| w[1].ks <= w[0].ks);
    Ok(CauchyReport {
        r,
        samples,
        sigma: SIGMA_KESTEN,
        rows,
        nonincreasing,
        records,
    })
}

/// `E_M = (1/pi^2) log M log log M - c(r) log M`.
pub fn centering(big_m: u64, c_r: f64) -> f64 {
    let l = (big_m as f64).ln();
    l * l.ln() / (PI * PI) - c_r * l
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxMinSample {
    pub sample: usize,
    pub big_m: u64,
    pub max: LocalSum,
    pub min: LocalSum,
    pub normalized_max: f64,
    pub normalized_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxMinReport {
    pub r: RationalR,
    pub big_m: u64,
    pub samples: usize,
    pub c_r: f64,
    pub e_m: f64,
    /// `(1/(2 pi)) log M`.
    pub scale: f64,
    /// Normalised maxima against `Stab(1, 1)`.
    pub ks_max: f64,
    /// Normalised minima against `Stab(1, -1)`.
    pub ks_min: f64,
    /// Two-sample KS between normalised maxima and negated minima.
    pub ks_reflection: f64,
    pub correlation: f64,
    /// `max(nmax, -nmin)` against the square of the `Stab(1, 1)` CDF.
    pub ks_abs_max: f64,
    pub records: Vec<MaxMinSample>,
}

/// The normalised pair
/// `((max S - E_M) / s, (min S + E_M) / s)`, `s = log M / (2 pi)`, over
/// `0 <= N < M` with `alpha` uniform and `beta = 0`.
pub fn maxmin_limit_sim(r: RationalR, big_m: u64, samples: usize, seed: u64) -> Result<MaxMinReport> {
    check_sizes(&[big_m], samples)?;
    let c_r = theta_and_c(&Modulus::new(r.m() as u64)?).c_r.to_f64();
    let e_m = centering(big_m, c_r);
    let scale = (big_m as f64).ln() / (2.0 * PI);
    let per_sample = par_map_indexed(samples, |i| {
        let mut rng = stream_rng(seed, PURPOSE_MAXMIN, i as u64);
        let cfg = BirkhoffConfig::from_words(word(&mut rng), r, 0)?;
        Ok(brute_maxmin_prefixes(&cfg, &[big_m])?.remove(0))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let records: Vec<MaxMinSample> = per_sample
        .iter()
        .enumerate()
        .map(|(i, mm)| MaxMinSample {
            sample: i,
            big_m,
            max: mm.max,
            min: mm.min,
            normalized_max: (mm.max.to_f64() - e_m) / scale,
            normalized_min: (mm.min.to_f64() + e_m) / scale,
        })
        .collect();
    let xs: Vec<f64> = records.iter().map(|s| s.normalized_max).collect();
    let ys: Vec<f64> = records.iter().map(|s| s.normalized_min).collect();
    let neg_ys: Vec<f64> = ys.iter().map(|y| -y).collect();
    let abs_max: Vec<f64> = xs.iter().zip(&neg_ys).map(|(x, y)| x.max(*y)).collect();
    Ok(MaxMinReport {
        r,
        big_m,
        samples,
        c_r,
        e_m,
        scale,
        ks_max: ks_one_sample(&sorted(xs.clone()), |x| stable_cdf(StableLaw::Plus, x)),
        ks_min: ks_one_sample(&sorted(ys.clone()), |x| stable_cdf(StableLaw::Minus, x)),
        ks_reflection: ks_two_sample(&sorted(xs.clone()), &sorted(neg_ys)),
        correlation: if samples > 1 { pearson(&xs, &ys) } else { 0.0 },
        ks_abs_max: ks_one_sample(&sorted(abs_max), |x| stable_cdf(StableLaw::Plus, x).powi(2)),
        records,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RsRow {
    pub sample: usize,
    pub alpha_word: String,
    pub r: RationalR,
    pub k: usize,
    /// `q_{k+1}`.
    pub big_m: u64,
    pub rs_max: f64,
    pub brute_max: LocalSum,
    pub rs_min: f64,
    pub brute_min: LocalSum,
    pub diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RsCheckReport {
    pub samples: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub rs: Vec<RationalR>,
    /// Largest `|rs - brute|` over all rows, maxima and minima.
    pub c_emp: f64,
    pub bound: f64,
    pub pass: bool,
    /// Extra draws rejected for having fewer than `k_max + 2` quotients.
    pub redraws: usize,
    pub rows: Vec<RsRow>,
}

/// Compares [`rs_maxmin`] with brute force for `k_min <= k <= k_max` over
/// random 64-bit dyadic `alpha` (conditioned on `k_max + 2` quotients).
pub fn rs_check(
    rs: &[RationalR],
    k_min: usize,
    k_max: usize,
    samples: usize,
    seed: u64,
    bound: f64,
) -> Result<RsCheckReport> {
    if samples == 0 || rs.is_empty() || k_min > k_max {
        return Err(Error::InvalidParameter("empty rs-check configuration".into()));
    }
    let per_sample = par_map_indexed(samples, |i| -> Result<(usize, Vec<RsRow>)> {
        let mut rng = stream_rng(seed, PURPOSE_RS, i as u64);
        let mut redraws = 0;
        let (word, cf) = loop {
            let w = word(&mut rng);
            let cf = expand_rational(&BigInt::from(w), &(BigInt::one() << 64u32))?;
            if cf.len() >= k_max + 2 {
                break (w, cf);
            }
            redraws += 1;
        };
        let a = cf.quotients();
        let mut q: Vec<u128> = vec![1, a[0] as u128];
        for j in 1..=k_max {
            let next = a[j] as u128 * q[j] + q[j - 1];
            q.push(next);
        }
        // q[k + 1] for k in range, strictly increasing since a_j >= 1 and k >= 1
        let ms: Vec<u64> = (k_min..=k_max).map(|k| q[k + 1] as u64).collect();
        let mut rows = Vec::new();
        let all = brute_maxmin_words(word, rs, &dedup_increasing(&ms))?;
        for (&r, brute) in rs.iter().zip(&all) {
            for k in k_min..=k_max {
                let e = rs_maxmin(&cf, k, r)?;
                let b = brute.iter().find(|b| b.big_m == q[k + 1] as u64).expect("prefix");
                let diff = (e.max_f64() - b.max.to_f64()).abs().max((e.min_f64() - b.min.to_f64()).abs());
                rows.push(RsRow {
                    sample: i,
                    alpha_word: format!("{word:#018x}"),
                    r,
                    k,
                    big_m: b.big_m,
                    rs_max: e.max_f64(),
                    brute_max: b.max,
                    rs_min: e.min_f64(),
                    brute_min: b.min,
                    diff,
                });
            }
        }
        Ok((redraws, rows))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let redraws = per_sample.iter().map(|p| p.0).sum();
    let rows: Vec<RsRow> = per_sample.into_iter().flat_map(|p| p.1).collect();
    let c_emp = rows.iter().map(|r| r.diff).fold(0.0, f64::max);
    Ok(RsCheckReport {
        samples,
        k_min,
        k_max,
        rs: rs.to_vec(),
        c_emp,
        bound,
        pass: c_emp <= bound,
        redraws,
        rows,
    })
}

fn dedup_increasing(ms: &[u64]) -> Vec<u64> {
    let mut v = ms.to_vec();
    v.dedup();
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct DnRow {
    pub n: u64,
    /// Median of `D_N / (log N log log N)`.
    pub median_ratio: f64,
    /// Median of `max_{N' < N} D_{N'} / (log N log log N)`, the maximum
    /// taken over a checkpoint grid (a lower bound for the true maximum).
    pub median_running_max_ratio: f64,
    pub reference: f64,
    pub reference_running_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DnTrend {
    pub samples: usize,
    pub rows: Vec<DnRow>,
    /// Medians decrease along the `N` list.
    pub decreasing: bool,
}

/// Checkpoints for the running maximum: twenty per decade up to `n_max`.
fn running_grid(ns: &[u64]) -> Vec<u64> {
    let n_max = *ns.last().expect("nonempty");
    let mut grid: Vec<u64> = (0..)
        .map(|k| (3.0 * 10f64.powf(k as f64 / 20.0)).round() as u64)
        .take_while(|&n| n < n_max)
        .collect();
    grid.extend_from_slice(ns);
    grid.sort_unstable();
    grid.dedup();
    grid
}

fn ratio_scale(n: u64) -> f64 {
    let l = (n as f64).ln();
    l * l.ln()
}

/// Trend of `D_N / (log N log log N)` towards `2/pi^2`, and of its running
/// maximum towards `3/pi^2`.
pub fn dn_ratio_trend(samples: usize, ns: &[u64], seed: u64) -> Result<DnTrend> {
    check_sizes(ns, samples)?;
    let grid = running_grid(ns);
    let q = 1u128 << 64;
    let per_sample: Vec<Vec<(f64, f64)>> = par_map_indexed(samples, |i| {
        let mut rng = stream_rng(seed, PURPOSE_DN, i as u64);
        let p = word(&mut rng) as u128;
        let mut best = 0i128;
        let mut out = Vec::with_capacity(ns.len());
        for &n in &grid {
            let d = scaled_discrepancy(&sorted_points(p, q, n), q);
            if ns.contains(&n) {
                let df = d as f64 / q as f64;
                out.push((df, (best.max(d) as f64) / q as f64));
            }
            best = best.max(d);
        }
        out
    });
    let rows: Vec<DnRow> = ns
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let s = ratio_scale(n);
            let a: Vec<f64> = per_sample.iter().map(|v| v[j].0 / s).collect();
            let b: Vec<f64> = per_sample.iter().map(|v| v[j].1 / s).collect();
            DnRow {
                n,
                median_ratio: median(&a),
                median_running_max_ratio: median(&b),
                reference: 2.0 / (PI * PI),
                reference_running_max: 3.0 / (PI * PI),
            }
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1].median_ratio < w[0].median_ratio);
    Ok(DnTrend {
        samples,
        rows,
        decreasing,
    })
}
