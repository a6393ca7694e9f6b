//! Command implementations behind the CLI: deterministic scenario runs
//! and trace analysis, with scriptable exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use aodvsim_core::scenario::ScenarioConfig;
use aodvsim_core::time::Time;
use aodvsim_core::Simulation;

use crate::scenario_text::parse_scenario;
use crate::stats::{compute, StatsReport};
use crate::tracefile::{parse_trace, write_stream};

/// Exit code for scenario parse failures.
pub const EXIT_SCENARIO_ERROR: i32 = 2;
/// Exit code for trace parse failures.
pub const EXIT_TRACE_ERROR: i32 = 3;
/// Exit code for I/O failures.
pub const EXIT_IO_ERROR: i32 = 4;

/// Anything a command can fail with, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Scenario(String),
    Trace(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) => EXIT_SCENARIO_ERROR,
            CliError::Trace(_) => EXIT_TRACE_ERROR,
            CliError::Io(_) => EXIT_IO_ERROR,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Scenario(m) => write!(f, "scenario error: {}", m),
            CliError::Trace(m) => write!(f, "trace error: {}", m),
            CliError::Io(m) => write!(f, "io error: {}", m),
        }
    }
}

impl std::error::Error for CliError {}

/// Options of the `run` subcommand. `None` overrides keep the scenario
/// file's values.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub scenario: PathBuf,
    pub trace_out: PathBuf,
    pub seed: Option<u64>,
    pub hello: Option<bool>,
    pub link_layer_detection: Option<bool>,
    pub stop: Option<f64>,
}

/// Loads a scenario file and applies the command-line overrides.
pub fn load_scenario(opts: &RunOptions) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(&opts.scenario)
        .map_err(|e| CliError::Io(format!("{}: {}", opts.scenario.display(), e)))?;
    let mut cfg = parse_scenario(&text).map_err(|e| CliError::Scenario(e.to_string()))?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(hello) = opts.hello {
        cfg.aodv.hello_enabled = hello;
    }
    if let Some(lld) = opts.link_layer_detection {
        cfg.link_layer_detection = lld;
    }
    if let Some(stop) = opts.stop {
        cfg.stop = Time::from_secs(stop);
        cfg.flows.retain(|f| f.start < cfg.stop);
        for f in &mut cfg.flows {
            if f.stop > cfg.stop {
                f.stop = cfg.stop;
            }
        }
    }
    Ok(cfg)
}

/// Runs the scenario to its stop time and writes the trace file.
pub fn cmd_run(opts: &RunOptions) -> Result<(), CliError> {
    let cfg = load_scenario(opts)?;
    let mut sim = Simulation::new(&cfg).map_err(CliError::Scenario)?;
    sim.run();
    let records = sim.into_records();
    let mut file = fs::File::create(&opts.trace_out)
        .map_err(|e| CliError::Io(format!("{}: {}", opts.trace_out.display(), e)))?;
    write_stream(&records, &mut file)
        .map_err(|e| CliError::Io(format!("{}: {}", opts.trace_out.display(), e)))?;
    println!(
        "wrote {} trace records to {}",
        records.len(),
        opts.trace_out.display()
    );
    Ok(())
}

/// Parses a trace file and computes its statistics.
pub fn cmd_stats(trace: &Path) -> Result<StatsReport, CliError> {
    let text = fs::read_to_string(trace)
        .map_err(|e| CliError::Io(format!("{}: {}", trace.display(), e)))?;
    let records = parse_trace(&text).map_err(|e| CliError::Trace(e.to_string()))?;
    Ok(compute(&records))
}
