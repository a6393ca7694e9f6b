//! File formats, statistics, and command implementations for the
//! `aodvsim` MANET simulator. The simulation engine itself lives in the
//! `aodvsim-core` crate; this one owns everything that touches text and
//! the filesystem.

pub mod run;
pub mod scenario_text;
pub mod stats;
pub mod tracefile;

pub use run::{cmd_run, cmd_stats, CliError, RunOptions};
pub use scenario_text::{parse_scenario, ScenarioParseError};
pub use stats::{compute, StatsReport};
pub use tracefile::{format_record, parse_line, parse_trace, write_stream, TraceParseError};
