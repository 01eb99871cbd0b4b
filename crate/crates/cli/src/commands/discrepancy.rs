use cfmod_core::discrepancy::{
    cauchy_limit_sim, dn_ratio_trend, maxmin_limit_sim, rs_check, stable_cdf, RationalR, StableLaw,
};
use serde_json::json;

use super::{decade_grid, seed, to_value, Command, Outcome};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{fmt_f64, Record, SampleTable};
use crate::tolerances::tol;

fn rotation_or_half(cfg: &RunConfig) -> RationalR {
    cfg.rotation().unwrap_or_else(|| RationalR::new(1, 2).expect("1/2"))
}

pub const RS_K_MIN: usize = 2;
pub const RS_K_MAX: usize = 12;

pub struct RsCheck;

impl Command for RsCheck {
    fn name(&self) -> &'static str {
        "rs-check"
    }

    fn summary(&self) -> &'static str {
        "alternating continued-fraction sums for max/min S_{N,r} against brute force"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let samples = cfg.samples.unwrap_or(50);
        let rs: Vec<RationalR> = match cfg.rotation() {
            Some(r) => vec![r],
            None => ["1/2", "1/3", "2/5", "3/7"]
                .iter()
                .map(|s| s.parse().expect("literal"))
                .collect(),
        };
        let bound = tol("rs_c_emp");
        let report = rs_check(&rs, RS_K_MIN, RS_K_MAX, samples, seed, bound)?;
        let mut records = vec![Record::at_most("c_emp", report.c_emp, bound)];
        for r in &rs {
            let worst = report
                .rows
                .iter()
                .filter(|row| row.r == *r)
                .map(|row| row.diff)
                .fold(0.0, f64::max);
            records.push(Record::at_most(format!("max_diff[r={r}]"), worst, bound));
        }
        let mut table = SampleTable::new(&[
            "seed", "sample", "alpha_word", "r", "k", "big_m", "rs_max", "brute_max", "rs_min", "brute_min", "diff",
        ]);
        for row in &report.rows {
            table.push(vec![
                seed.to_string(),
                row.sample.to_string(),
                row.alpha_word.clone(),
                row.r.to_string(),
                row.k.to_string(),
                row.big_m.to_string(),
                fmt_f64(row.rs_max),
                row.brute_max.to_string(),
                fmt_f64(row.rs_min),
                row.brute_min.to_string(),
                fmt_f64(row.diff),
            ]);
        }
        Ok(Outcome {
            parameters: json!({
                "samples": samples, "seed": seed, "k_min": RS_K_MIN, "k_max": RS_K_MAX,
                "r": rs.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            }),
            records,
            details: json!({
                "c_emp": report.c_emp,
                "bound": report.bound,
                "redraws": report.redraws,
            }),
            samples: Some(table),
        })
    }
}

pub struct CauchySim;

impl Command for CauchySim {
    fn name(&self) -> &'static str {
        "cauchy-sim"
    }

    fn summary(&self) -> &'static str {
        "S_{N,r} / (sigma log N) over random (alpha, beta) against the Cauchy law"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let r = rotation_or_half(cfg);
        let n = cfg.n.unwrap_or(100_000);
        let samples = cfg.samples.unwrap_or(2000);
        let ns = decade_grid(n);
        let report = cauchy_limit_sim(r, &ns, samples, seed)?;
        let last = report.rows.last().expect("nonempty grid");
        let increases = report.rows.windows(2).filter(|w| w[1].ks > w[0].ks).count();
        let records = vec![
            Record::at_most(format!("cauchy_ks[N={}]", last.n), last.ks, tol("cauchy_ks")),
            Record::exact("ks_increases_along_n", increases, 0),
        ];
        let mut table = SampleTable::new(&["seed", "sample", "n", "s", "normalized"]);
        for rec in &report.records {
            table.push(vec![
                seed.to_string(),
                rec.sample.to_string(),
                rec.n.to_string(),
                rec.s.to_string(),
                fmt_f64(rec.normalized),
            ]);
        }
        Ok(Outcome {
            parameters: json!({ "r": r.to_string(), "n": ns, "samples": samples, "seed": seed }),
            records,
            details: json!({ "sigma": report.sigma, "rows": to_value(&report.rows) }),
            samples: Some(table),
        })
    }
}

/// Largest `|F_{+1}(x) + F_{-1}(-x) - 1|` over `x = -50, -49.9, ..., 50`.
fn reflection_gap() -> f64 {
    (0..=1000)
        .map(|i| {
            let x = -50.0 + 0.1 * i as f64;
            (stable_cdf(StableLaw::Plus, x) + stable_cdf(StableLaw::Minus, -x) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

pub struct StableSim;

impl Command for StableSim {
    fn name(&self) -> &'static str {
        "stable-sim"
    }

    fn summary(&self) -> &'static str {
        "normalised max and min of S_{N,r} over N < M: reflection symmetry and asymptotic independence"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let r = rotation_or_half(cfg);
        let big_m = cfg.big_m.unwrap_or(1_000_000);
        let samples = cfg.samples.unwrap_or(2000);
        if samples < 2 {
            return Err(CliError::Usage("stable-sim needs at least 2 samples".into()));
        }
        let report = maxmin_limit_sim(r, big_m, samples, seed)?;
        let records = vec![
            Record::at_most("reflection_ks[max,-min]", report.ks_reflection, tol("reflection_ks")),
            Record::at_most("abs_correlation[max,min]", report.correlation.abs(), tol("maxmin_correlation")),
            Record::at_most("stable_cdf_reflection", reflection_gap(), tol("stable_reflection")),
        ];
        let mut table = SampleTable::new(&["seed", "sample", "big_m", "max", "min", "normalized_max", "normalized_min"]);
        for rec in &report.records {
            table.push(vec![
                seed.to_string(),
                rec.sample.to_string(),
                rec.big_m.to_string(),
                rec.max.to_string(),
                rec.min.to_string(),
                fmt_f64(rec.normalized_max),
                fmt_f64(rec.normalized_min),
            ]);
        }
        Ok(Outcome {
            parameters: json!({ "r": r.to_string(), "big_m": big_m, "samples": samples, "seed": seed }),
            records,
            details: json!({
                "c_r": report.c_r,
                "e_m": report.e_m,
                "scale": report.scale,
                "ks_max_vs_stable_plus": report.ks_max,
                "ks_min_vs_stable_minus": report.ks_min,
                "ks_abs_max_vs_squared_cdf": report.ks_abs_max,
                "correlation": report.correlation,
            }),
            samples: Some(table),
        })
    }
}

pub struct DnTrend;

impl Command for DnTrend {
    fn name(&self) -> &'static str {
        "dn-trend"
    }

    fn summary(&self) -> &'static str {
        "medians of D_N / (log N log log N) and of their running maxima against 2/pi^2 and 3/pi^2"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let n = cfg.n.unwrap_or(100_000);
        let samples = cfg.samples.unwrap_or(200);
        let ns = decade_grid(n);
        let trend = dn_ratio_trend(samples, &ns, seed)?;
        let increases = trend
            .rows
            .windows(2)
            .filter(|w| w[1].median_ratio >= w[0].median_ratio)
            .count();
        let mut table = SampleTable::new(&[
            "n",
            "median_ratio",
            "median_running_max_ratio",
            "reference",
            "reference_running_max",
        ]);
        for row in &trend.rows {
            table.push(vec![
                row.n.to_string(),
                fmt_f64(row.median_ratio),
                fmt_f64(row.median_running_max_ratio),
                fmt_f64(row.reference),
                fmt_f64(row.reference_running_max),
            ]);
        }
        Ok(Outcome {
            parameters: json!({ "n": ns, "samples": samples, "seed": seed }),
            records: vec![Record::exact("median_non_decreases", increases, 0)],
            details: to_value(&trend),
            samples: Some(table),
        })
    }
}
