use cfmod_core::gauss_kuzmin::{mixing_decay_report, TransferConfig};
use cfmod_core::zmod::Modulus;
use serde_json::json;

use super::{to_value, Command, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::Record;
use crate::tolerances::tol;

pub struct Mixing;

impl Command for Mixing {
    fn name(&self) -> &'static str {
        "mixing"
    }

    fn summary(&self) -> &'static str {
        "transfer-operator decay of the law of P_n from the Lebesgue start against C exp(-tau n)"
    }

    fn needs_seed(&self) -> bool {
        false
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let m = cfg.m.unwrap_or(2);
        let n = cfg.n.unwrap_or(200) as usize;
        let config = TransferConfig::default();
        let report = mixing_decay_report(&Modulus::new(m as u64)?, n, &|_| 1.0, 0.0, config)?;
        let over = report.rows.iter().filter(|r| !r.pass).count();
        let mut records = vec![Record::exact("decay_bound_violations", over, 0)];
        if let Some(row) = report.rows.iter().find(|r| r.n == 20) {
            records.push(Record::at_most("sup_distance[n=20]", row.sup_distance, tol("decay_n20")));
        }
        Ok(Outcome {
            parameters: json!({
                "m": m, "n": n, "lipschitz": 0.0,
                "grid_size": config.grid_size, "b_cut": config.b_cut,
            }),
            records,
            details: to_value(&report),
            samples: None,
        })
    }
}
