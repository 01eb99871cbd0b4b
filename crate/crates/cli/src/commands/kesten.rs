use cfmod_core::kesten::constants_table;
use cfmod_core::zmod::Modulus;
use serde_json::json;

use super::{required_m, to_value, Command, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::Record;
use crate::tolerances::tol;

pub struct KestenConstants;

impl Command for KestenConstants {
    fn name(&self) -> &'static str {
        "kesten-constants"
    }

    fn summary(&self) -> &'static str {
        "Kesten's variance constants, the 1/6 identity, F(u), theta_m and c(1/m)"
    }

    fn needs_seed(&self) -> bool {
        false
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome> {
        let m = required_m(cfg)?;
        let rows = constants_table(&Modulus::new(m as u64)?)?;
        let records = rows
            .iter()
            .map(|row| match (row.name.split('[').next().unwrap_or(""), &row.exact) {
                ("identity_sixth", Some(exact)) => Record::exact(&row.name, exact, "1/6"),
                ("F(1/2)", _) if row.name.contains("quadrature") => {
                    Record::abs(&row.name, row.value, row.expected, tol("f_quadrature"))
                }
                ("F(1/2)", _) => Record::abs(&row.name, row.value, row.expected, tol("closed_form")),
                ("sigma" | "sigma_prime", _) => {
                    Record::abs(&row.name, row.value, row.expected, tol("kesten_constant"))
                }
                _ => Record::abs(&row.name, row.value, row.expected, tol("double_evaluation")),
            })
            .collect();
        Ok(Outcome {
            parameters: json!({ "m": m }),
            records,
            details: json!({ "table": to_value(&rows) }),
            samples: None,
        })
    }
}
