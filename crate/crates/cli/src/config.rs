use std::path::PathBuf;

use cfmod_core::cf::MIN_BITS;
use cfmod_core::discrepancy::RationalR;
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// One invocation: the command name and every knob it may read.
///
/// Budgets left unset fall back to per-command defaults, which are echoed
/// in the report's `parameters`.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "cfmod", version, about = "Continued fractions modulo m: exact audits, limit laws and discrepancy")]
pub struct RunConfig {
    /// group-audit, szusz, sigma, clt, mixing, kesten-constants, rs-check,
    /// cauchy-sim, stable-sim or dn-trend.
    pub command: String,

    #[arg(long)]
    pub m: Option<u32>,

    /// Rotation number `l/m`.
    #[arg(long, value_parser = parse_r)]
    pub r: Option<String>,

    #[arg(long)]
    pub n: Option<u64>,

    #[arg(long = "big-m")]
    pub big_m: Option<u64>,

    #[arg(long)]
    pub samples: Option<usize>,

    /// Master seed; mandatory for every simulation.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Initial sampling precision in bits.
    #[arg(long)]
    pub bits: Option<u32>,

    /// Sampling law for `alpha` (uniform or gauss).
    #[arg(long)]
    pub law: Option<String>,

    /// Frequency target for szusz: q, p, pair or matrix.
    #[arg(long)]
    pub target: Option<String>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads; results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
}

fn parse_r(s: &str) -> std::result::Result<String, String> {
    s.parse::<RationalR>().map(|r| r.to_string()).map_err(|e| e.to_string())
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            m: None,
            r: None,
            n: None,
            big_m: None,
            samples: None,
            seed: None,
            bits: None,
            law: None,
            target: None,
            out: None,
            format: Format::Json,
            workers: None,
        }
    }

    /// Budgets must be positive when given.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n.map(|v| v as u128)),
            ("big-m", self.big_m.map(|v| v as u128)),
            ("samples", self.samples.map(|v| v as u128)),
            ("workers", self.workers.map(|v| v as u128)),
        ];
        for (name, v) in positive {
            if v == Some(0) {
                return Err(CliError::Usage(format!("--{name} must be positive")));
            }
        }
        if let Some(b) = self.bits {
            if b < MIN_BITS {
                return Err(CliError::Usage(format!("--bits must be at least {MIN_BITS}")));
            }
        }
        if let Some(m) = self.m {
            if m < 2 {
                return Err(CliError::Usage("--m must be at least 2".into()));
            }
        }
        Ok(())
    }

    pub fn rotation(&self) -> Option<RationalR> {
        self.r.as_deref().map(|s| s.parse().expect("validated when parsed"))
    }
}
