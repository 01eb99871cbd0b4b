//! Command-line harness: configuration, dispatch through a command
//! registry, and JSON/CSV report emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod tolerances;

use std::time::Instant;

pub use commands::{lookup, registry, Command, Outcome};
pub use config::{Format, RunConfig};
pub use error::{CliError, Result};
pub use report::{emit, Record, ReportEnvelope};

/// Validates `cfg`, runs the command on a pool of `cfg.workers` threads and
/// wraps the outcome in an envelope. Nothing is written.
pub fn run(cfg: &RunConfig) -> Result<ReportEnvelope> {
    cfg.validate()?;
    let command = lookup(&cfg.command)?;
    if command.needs_seed() && cfg.seed.is_none() {
        return Err(CliError::MissingSeed(cfg.command.clone()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {:?} workers: {e}", cfg.workers)))?;
    let start = Instant::now();
    let outcome = pool.install(|| command.run(cfg))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let pass = outcome.records.iter().all(|r| r.pass);
    Ok(ReportEnvelope {
        tool: "cfmod".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        config: cfg.clone(),
        tolerances: tolerances::ToleranceTable::defaults(),
        parameters: outcome.parameters,
        records: outcome.records,
        pass,
        details: outcome.details,
        samples: outcome.samples,
        runtime: report::Runtime {
            wall_time_s,
            workers: pool.current_num_threads(),
        },
    })
}

/// [`run`] followed by [`emit`]; returns the process exit code.
pub fn run_and_emit(cfg: &RunConfig) -> Result<i32> {
    let report = run(cfg)?;
    emit(&report, cfg.format, cfg.out.as_deref())?;
    Ok(report.exit_code())
}
