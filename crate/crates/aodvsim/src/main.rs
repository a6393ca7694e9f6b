use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aodvsim::run::{cmd_run, cmd_stats, RunOptions};

#[derive(Parser)]
#[command(
    name = "aodvsim",
    about = "Deterministic AODV ad-hoc network simulator with NS-2 style wireless traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(format!("expected `on` or `off`, found `{}`", s)),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the trace file.
    Run {
        /// Scenario file to simulate.
        #[arg(long)]
        scenario: PathBuf,
        /// Where the trace is written.
        #[arg(long = "trace-out")]
        trace_out: PathBuf,
        /// Random seed override (scenario default: 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Force HELLO beacons on or off.
        #[arg(long, value_parser = parse_on_off)]
        hello: Option<bool>,
        /// Force link-layer failure detection on or off.
        #[arg(long, value_parser = parse_on_off)]
        lld: Option<bool>,
        /// Simulation end-time override, seconds.
        #[arg(long)]
        stop: Option<f64>,
    },
    /// Analyze a trace file.
    Stats {
        /// Trace file to read.
        #[arg(long)]
        trace: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            trace_out,
            seed,
            hello,
            lld,
            stop,
        } => cmd_run(&RunOptions {
            scenario,
            trace_out,
            seed,
            hello,
            link_layer_detection: lld,
            stop,
        }),
        Command::Stats { trace } => cmd_stats(&trace).map(|report| {
            print!("{}", report.human_table());
            println!();
            print!("{}", report.machine_lines());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aodvsim: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
