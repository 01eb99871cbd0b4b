use cfmod_core::arith::{gcd, prime_factors};
use cfmod_core::zmod::{enumerate_det_class, generator_cover, marginal_audit, nu_table, Modulus, COVER_CAP};
use num_rational::BigRational;
use serde_json::json;

use super::{required_m, to_value, Command, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::Record;

pub struct GroupAudit;

/// `m^3 prod_{p | m} (1 - 1/p^2)`.
fn class_size_formula(m: u64) -> u64 {
    prime_factors(m)
        .into_iter()
        .fold(m * m * m, |n, p| n / (p * p) * (p * p - 1))
}

impl Command for GroupAudit {
    fn name(&self) -> &'static str {
        "group-audit"
    }

    fn summary(&self) -> &'static str {
        "exact class sizes, marginal audits, nu and generator coverage for one modulus"
    }

    fn needs_seed(&self) -> bool {
        false
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let m = required_m(cfg)?;
        let modulus = Modulus::new(m as u64)?;
        let mut records = Vec::new();
        let mut audits = Vec::new();
        let formula = class_size_formula(m as u64);
        for d in (1..m).filter(|&d| gcd(d as u64, m as u64) == 1) {
            let cls = enumerate_det_class(&modulus, d)?;
            records.push(Record::exact(format!("class_size[D={d}]"), cls.len(), formula));
            let audit = marginal_audit(&cls);
            records.push(Record::exact(
                format!("marginal_violations[D={d}]"),
                audit.violations.len(),
                0,
            ));
            audits.push(audit);
        }

        let nu = nu_table(&modulus);
        let total = nu.total();
        records.push(Record::exact("nu_total", fmt_ratio(&total), "1/1"));
        let mut unit_violations = 0usize;
        for a in 0..m {
            for u in modulus.units() {
                let ua = ((u as u64 * a as u64) % m as u64) as u32;
                if nu.weight(ua) != nu.weight(a) {
                    unit_violations += 1;
                }
            }
        }
        records.push(Record::exact("nu_unit_invariance_violations", unit_violations, 0));

        let cover = if m <= COVER_CAP {
            let c = generator_cover(&modulus)?;
            records.push(Record::exact("generator_cover_violations", c.violations.len(), 0));
            records.push(Record::at_least(
                "admissible_y_min",
                c.min_admissible_y,
                c.phi_m_prime as u64,
            ));
            Some(c)
        } else {
            None
        };

        let nu_strings: Vec<String> = nu.weights().iter().map(fmt_ratio).collect();
        Ok(Outcome {
            parameters: json!({ "m": m }),
            records,
            details: json!({
                "class_size_formula": formula,
                "v_size": modulus.v_size(),
                "nu": nu_strings,
                "audits": to_value(&audits),
                "generator_cover": cover.as_ref().map(to_value),
                "generator_cover_cap": COVER_CAP,
            }),
            samples: None,
        })
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
