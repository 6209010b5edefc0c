//! Command-line front end: argument and config parsing, input loading,
//! result envelopes.

pub mod args;
pub mod commands;
pub mod error;
pub mod expr;
pub mod inputs;
pub mod output;

use std::time::Instant;

use args::{Cli, Command, Global, RunConfig};
use error::{CliError, CliResult};
use inputs::Inputs;
use output::{to_json, write_file, Envelope, InputDigest, SCHEMA};

/// Resolves `run --config` and executes. Returns the result JSON when it
/// goes to standard output.
pub fn dispatch(cli: Cli) -> CliResult<Option<String>> {
    let mut inputs = Inputs::default();
    let config = match cli.command {
        Command::Run(r) => {
            let text = inputs.read(&r.config)?;
            let mut config: RunConfig =
                serde_json::from_str(&text).map_err(|e| CliError::ConfigParse(format!("{}: {e}", r.config.display())))?;
            overlay(&mut config.global, cli.global);
            config
        }
        command => RunConfig { command, global: cli.global },
    };
    execute(&config, &mut inputs)
}

/// Flags given on the command line override the config file.
fn overlay(base: &mut Global, flags: Global) {
    base.out = flags.out.or(base.out.take());
    base.csv = flags.csv.or(base.csv.take());
    base.seed = flags.seed.or(base.seed);
    base.tol_feas = flags.tol_feas.or(base.tol_feas);
    base.tol_kkt = flags.tol_kkt.or(base.tol_kkt);
    base.time_budget_ms = flags.time_budget_ms.or(base.time_budget_ms);
}

pub fn execute(config: &RunConfig, inputs: &mut Inputs) -> CliResult<Option<String>> {
    let start = Instant::now();
    let outcome = commands::execute(&config.command, &config.global, inputs)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    // Output locations are not part of the comparable payload.
    let recorded = RunConfig { command: config.command.clone(), global: Global { out: None, csv: None, ..config.global.clone() } };
    let envelope = Envelope {
        schema: SCHEMA,
        command: config.command.name(),
        parameters: commands::value(&recorded)?,
        inputs: inputs.digests().into_iter().map(|(path, sha256)| InputDigest { path, sha256 }).collect(),
        result: outcome.result,
        runtime_ms,
    };
    let text = to_json(&envelope)?;
    if let (Some(table), Some(path)) = (&outcome.table, &config.global.csv) {
        write_file(path, &table.to_csv()?)?;
    }
    match &config.global.out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
