//! Subcommands, looked up by name in [`registry`].

mod discrepancy;
mod group_audit;
mod kesten;
mod limit;
mod mixing;

use std::sync::Arc;

use cfmod_core::cf::{law_by_name, SamplingLaw};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{Record, SampleTable};

/// What a command hands back to the envelope.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub parameters: Value,
    pub records: Vec<Record>,
    pub details: Value,
    pub samples: Option<SampleTable>,
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Simulations refuse to run without an explicit seed.
    fn needs_seed(&self) -> bool;

    fn run(&self, cfg: &RunConfig) -> Result<Outcome>;
}

static COMMANDS: &[&dyn Command] = &[
    &group_audit::GroupAudit,
    &limit::Szusz,
    &limit::Sigma,
    &limit::Clt,
    &mixing::Mixing,
    &kesten::KestenConstants,
    &discrepancy::RsCheck,
    &discrepancy::CauchySim,
    &discrepancy::StableSim,
    &discrepancy::DnTrend,
];

pub fn registry() -> &'static [&'static dyn Command] {
    COMMANDS
}

pub fn lookup(name: &str) -> Result<&'static dyn Command> {
    COMMANDS
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(|| CliError::UnknownCommand(name.to_string()))
}

pub(crate) fn seed(cfg: &RunConfig) -> Result<u64> {
    cfg.seed.ok_or_else(|| CliError::MissingSeed(cfg.command.clone()))
}

pub(crate) fn required_m(cfg: &RunConfig) -> Result<u32> {
    cfg.m
        .ok_or_else(|| CliError::Usage(format!("{} needs --m", cfg.command)))
}

pub(crate) fn law(cfg: &RunConfig) -> Result<Arc<dyn SamplingLaw>> {
    let name = cfg.law.as_deref().unwrap_or("gauss");
    law_by_name(name).ok_or_else(|| CliError::Usage(format!("unknown law {name:?} (uniform or gauss)")))
}

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// `10^3, 10^4, ...` below `n`, then `n`.
pub(crate) fn decade_grid(n: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = std::iter::successors(Some(1000u64), |&x| x.checked_mul(10))
        .take_while(|&x| x < n)
        .collect();
    grid.push(n);
    grid
}
