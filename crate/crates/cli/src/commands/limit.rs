use std::sync::Arc;

use cfmod_core::cf::{Gauss, Uniform};
use cfmod_core::limit_stats::{
    clt_from_sums, cross_ks, pn_sums, sigma_f, szusz_frequencies, variance_from_sums, MonteCarlo, SigmaConfig,
    SigmaEstimate, SzuszTarget, TestFunction, VarianceEstimate,
};
use cfmod_core::zmod::{Group, ModMatrix, Modulus};
use serde_json::json;

use super::{law, seed, to_value, Command, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::Record;
use crate::tolerances::tol;

/// Draws for the Monte Carlo tail of the `sigma_f^2` series.
pub const SIGMA_MC_SAMPLES: usize = 20_000;

fn indicator_of_identity(m: u32) -> Result<TestFunction> {
    let group = Arc::new(Group::new(&Modulus::new(m as u64)?)?);
    Ok(TestFunction::indicator(group, &ModMatrix::identity(m))?)
}

fn series(f: &TestFunction, seed: u64) -> Result<SigmaEstimate> {
    Ok(sigma_f(f, &SigmaConfig::new(MonteCarlo::gauss(SIGMA_MC_SAMPLES, seed)))?)
}

fn variance_record(v: &VarianceEstimate, s: &SigmaEstimate) -> Record {
    let se = (v.std_error.powi(2) + s.total_error().powi(2)).sqrt();
    Record::std_errors(
        format!("variance_vs_series[N={}]", v.n),
        v.estimate,
        s.sigma_sq,
        se,
        tol("variance_std_errors"),
    )
}

pub struct Szusz;

impl Command for Szusz {
    fn name(&self) -> &'static str {
        "szusz"
    }

    fn summary(&self) -> &'static str {
        "frequencies of q_n, p_n, (p_n, q_n) or P_n modulo m against their exact limits"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let m = cfg.m.unwrap_or(2);
        let n = cfg.n.unwrap_or(10_000) as usize;
        let samples = cfg.samples.unwrap_or(1000);
        let target: SzuszTarget = cfg.target.as_deref().unwrap_or("q").parse()?;
        let mc = MonteCarlo::new(samples, seed, law(cfg)?).with_bits(cfg.bits);
        let report = szusz_frequencies(&Modulus::new(m as u64)?, n, &mc, target)?;
        let records = report
            .cells
            .iter()
            .map(|c| {
                Record::std_errors(
                    format!("freq[{}]", c.label),
                    c.estimate,
                    c.expected,
                    c.std_error,
                    tol("szusz_std_errors"),
                )
            })
            .collect();
        Ok(Outcome {
            parameters: json!({
                "m": m, "n": n, "samples": samples, "seed": seed,
                "target": to_value(&target), "law": mc.law.name(),
            }),
            records,
            details: to_value(&report),
            samples: None,
        })
    }
}

pub struct Sigma;

impl Command for Sigma {
    fn name(&self) -> &'static str {
        "sigma"
    }

    fn summary(&self) -> &'static str {
        "series sigma_f^2 for the indicator of the identity against the empirical variance"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let m = cfg.m.unwrap_or(2);
        let n = cfg.n.unwrap_or(10_000) as usize;
        let samples = cfg.samples.unwrap_or(2000);
        let f = indicator_of_identity(m)?;
        let s = series(&f, seed)?;
        let mc = MonteCarlo::new(samples, seed, law(cfg)?).with_bits(cfg.bits);
        let sums = pn_sums(&[&f], n, &mc)?;
        let v = variance_from_sums(&sums[0], n);
        Ok(Outcome {
            parameters: json!({
                "m": m, "n": n, "samples": samples, "seed": seed,
                "sigma_mc_samples": SIGMA_MC_SAMPLES, "law": mc.law.name(),
            }),
            records: vec![variance_record(&v, &s)],
            details: json!({ "sigma": to_value(&s), "variance": to_value(&v) }),
            samples: None,
        })
    }
}

pub struct Clt;

impl Command for Clt {
    fn name(&self) -> &'static str {
        "clt"
    }

    fn summary(&self) -> &'static str {
        "normalised sums of the identity indicator against N(0, sigma_f^2), uniform vs Gauss start"
    }

    fn needs_seed(&self) -> bool {
        true
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let seed = seed(cfg)?;
        let m = cfg.m.unwrap_or(2);
        let n = cfg.n.unwrap_or(10_000) as usize;
        let samples = cfg.samples.unwrap_or(10_000);
        let f = indicator_of_identity(m)?;
        let s = series(&f, seed)?;
        let gauss = MonteCarlo::new(samples, seed, Arc::new(Gauss)).with_bits(cfg.bits);
        let uniform = MonteCarlo::new(samples, seed, Arc::new(Uniform)).with_bits(cfg.bits);
        let g = pn_sums(&[&f], n, &gauss)?.remove(0);
        let u = pn_sums(&[&f], n, &uniform)?.remove(0);
        let clt = clt_from_sums(&f, &g, n, s.sigma_sq, s.total_error(), tol("clt_ks"));
        let cross = cross_ks(&f, &u, &g, n);
        let v = variance_from_sums(&g, n);
        let records = vec![
            Record::at_most(format!("clt_{:?}[gauss]", clt.mode).to_lowercase(), clt.estimate, clt.threshold),
            Record::at_most("cross_ks[uniform,gauss]", cross, tol("clt_cross_ks")),
            variance_record(&v, &s),
        ];
        Ok(Outcome {
            parameters: json!({
                "m": m, "n": n, "samples": samples, "seed": seed,
                "sigma_mc_samples": SIGMA_MC_SAMPLES,
            }),
            records,
            details: json!({ "clt": to_value(&clt), "sigma": to_value(&s), "variance": to_value(&v) }),
            samples: None,
        })
    }
}
