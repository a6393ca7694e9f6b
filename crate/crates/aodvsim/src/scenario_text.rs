//! Scenario file format.
//!
//! A line-oriented section format mirroring the semantics of the usual
//! wireless TCL setup without embedding a TCL interpreter:
//!
//! ```text
//! [options]            # key = value
//! nn = 3               # node count
//! x = 500              # field width, meters
//! y = 400              # field height, meters
//! stop = 150           # simulation end, seconds
//! range = 250          # radio range, meters
//! per_hop_delay = 0.002
//! seed = 0
//! hello = off          # periodic HELLO beacons
//! lld = on             # link-layer failure detection
//!
//! [positions]          # node x y
//! 0 5.0 5.0
//!
//! [motion]             # at node x y speed   (a setdest command)
//! 10.0 0 250.0 250.0 3.0
//!
//! [flows]              # src dst rate payload start stop
//! 0 1 4.0 512 10.0 150.0
//!
//! [aodv]               # key = value, protocol constant overrides
//! hello_interval = 1.0
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Every option has a
//! default, so the minimal valid file is `[options]` + `nn` +
//! `[positions]` rows for each node.

use aodvsim_core::medium::{MotionEvent, Position};
use aodvsim_core::packet::NodeId;
use aodvsim_core::scenario::{FlowSpec, ScenarioConfig};
use aodvsim_core::time::Time;

/// A scenario parse failure at a specific line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ScenarioParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ScenarioParseError {}

fn err(line: usize, message: impl Into<String>) -> ScenarioParseError {
    ScenarioParseError {
        line,
        message: message.into(),
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Section {
    None,
    Options,
    Positions,
    Motion,
    Flows,
    Aodv,
}

fn parse_num<T: core::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, ScenarioParseError> {
    s.parse()
        .map_err(|_| err(line, format!("malformed {} `{}`", what, s)))
}

fn parse_on_off(s: &str, line: usize, key: &str) -> Result<bool, ScenarioParseError> {
    match s {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(err(line, format!("{} expects on or off, found `{}`", key, s))),
    }
}

/// Parses scenario text into a validated configuration, or the first
/// error with its line number. Omitted options keep their defaults.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioParseError> {
    let mut cfg = ScenarioConfig::default();
    let mut section = Section::None;
    let mut positions: Vec<Option<(usize, Position)>> = Vec::new();
    let mut hello_interval_set = false;
    let mut min_hello_set = false;
    let mut max_hello_set = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.split_once('#') {
            Some((content, _)) => content.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name {
                "options" => Section::Options,
                "positions" => Section::Positions,
                "motion" => Section::Motion,
                "flows" => Section::Flows,
                "aodv" => Section::Aodv,
                _ => return Err(err(lineno, format!("unknown section `[{}]`", name))),
            };
            continue;
        }
        match section {
            Section::None => {
                return Err(err(lineno, "content before the first section header"));
            }
            Section::Options | Section::Aodv => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| err(lineno, format!("expected key = value, found `{}`", line)))?;
                let (key, value) = (key.trim(), value.trim());
                if section == Section::Options {
                    match key {
                        "nn" => {
                            cfg.node_count = parse_num(value, lineno, "node count")?;
                            positions = vec![None; cfg.node_count as usize];
                        }
                        "x" => cfg.field_x = parse_num(value, lineno, "field width")?,
                        "y" => cfg.field_y = parse_num(value, lineno, "field height")?,
                        "stop" => {
                            cfg.stop = Time::from_secs(parse_num(value, lineno, "stop time")?)
                        }
                        "range" => cfg.range = parse_num(value, lineno, "range")?,
                        "per_hop_delay" => {
                            cfg.per_hop_delay = parse_num(value, lineno, "per-hop delay")?
                        }
                        "seed" => cfg.seed = parse_num(value, lineno, "seed")?,
                        "hello" => cfg.aodv.hello_enabled = parse_on_off(value, lineno, "hello")?,
                        "lld" => {
                            cfg.link_layer_detection = parse_on_off(value, lineno, "lld")?
                        }
                        _ => return Err(err(lineno, format!("unknown option `{}`", key))),
                    }
                } else {
                    match key {
                        "hello_interval" => {
                            cfg.aodv.hello_interval = parse_num(value, lineno, "interval")?;
                            hello_interval_set = true;
                        }
                        "allowed_hello_loss" => {
                            cfg.aodv.allowed_hello_loss = parse_num(value, lineno, "count")?
                        }
                        "min_hello_interval" => {
                            cfg.aodv.min_hello_interval = parse_num(value, lineno, "interval")?;
                            min_hello_set = true;
                        }
                        "max_hello_interval" => {
                            cfg.aodv.max_hello_interval = parse_num(value, lineno, "interval")?;
                            max_hello_set = true;
                        }
                        "bcast_id_save" => {
                            cfg.aodv.bcast_id_save = parse_num(value, lineno, "period")?
                        }
                        "frequency" => cfg.aodv.frequency = parse_num(value, lineno, "period")?,
                        "network_diameter" => {
                            cfg.aodv.network_diameter = parse_num(value, lineno, "hop count")?
                        }
                        "rreq_retries" => {
                            cfg.aodv.rreq_retries = parse_num(value, lineno, "count")?
                        }
                        "active_route_timeout" => {
                            cfg.aodv.active_route_timeout = parse_num(value, lineno, "timeout")?
                        }
                        "my_route_timeout" => {
                            cfg.aodv.my_route_timeout = parse_num(value, lineno, "timeout")?
                        }
                        "delete_period" => {
                            cfg.aodv.delete_period = parse_num(value, lineno, "period")?
                        }
                        "rreq_retry_base" => {
                            cfg.aodv.rreq_retry_base = parse_num(value, lineno, "period")?
                        }
                        _ => return Err(err(lineno, format!("unknown aodv constant `{}`", key))),
                    }
                }
            }
            Section::Positions => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(err(lineno, "expected: node x y"));
                }
                let node: u16 = parse_num(parts[0], lineno, "node id")?;
                if node >= cfg.node_count {
                    return Err(err(
                        lineno,
                        format!("node {} out of range (nn = {})", node, cfg.node_count),
                    ));
                }
                let x = parse_num(parts[1], lineno, "x coordinate")?;
                let y = parse_num(parts[2], lineno, "y coordinate")?;
                if positions[node as usize]
                    .replace((lineno, Position::new(x, y)))
                    .is_some()
                {
                    return Err(err(lineno, format!("node {} positioned twice", node)));
                }
            }
            Section::Motion => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 5 {
                    return Err(err(lineno, "expected: at node x y speed"));
                }
                let at: f64 = parse_num(parts[0], lineno, "activation time")?;
                let node: u16 = parse_num(parts[1], lineno, "node id")?;
                if node >= cfg.node_count {
                    return Err(err(
                        lineno,
                        format!("node {} out of range (nn = {})", node, cfg.node_count),
                    ));
                }
                let x = parse_num(parts[2], lineno, "x coordinate")?;
                let y = parse_num(parts[3], lineno, "y coordinate")?;
                let speed: f64 = parse_num(parts[4], lineno, "speed")?;
                if speed.is_nan() || speed <= 0.0 {
                    return Err(err(lineno, "speed must be positive"));
                }
                cfg.motions.push(MotionEvent {
                    at: Time::from_secs(at),
                    node: NodeId(node),
                    dest: Position::new(x, y),
                    speed,
                });
            }
            Section::Flows => {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 6 {
                    return Err(err(lineno, "expected: src dst rate payload start stop"));
                }
                let src: u16 = parse_num(parts[0], lineno, "source node")?;
                let dst: u16 = parse_num(parts[1], lineno, "destination node")?;
                for node in [src, dst] {
                    if node >= cfg.node_count {
                        return Err(err(
                            lineno,
                            format!("node {} out of range (nn = {})", node, cfg.node_count),
                        ));
                    }
                }
                let rate: f64 = parse_num(parts[2], lineno, "rate")?;
                let payload: u32 = parse_num(parts[3], lineno, "payload size")?;
                let start: f64 = parse_num(parts[4], lineno, "start time")?;
                let stop: f64 = parse_num(parts[5], lineno, "stop time")?;
                if start >= stop {
                    return Err(err(lineno, "flow must start before it stops"));
                }
                cfg.flows.push(FlowSpec {
                    src: NodeId(src),
                    dst: NodeId(dst),
                    rate,
                    payload,
                    start: Time::from_secs(start),
                    stop: Time::from_secs(stop),
                });
            }
        }
    }

    if cfg.node_count == 0 {
        return Err(err(0, "scenario sets no nodes (nn)"));
    }
    for (i, p) in positions.iter().enumerate() {
        match p {
            Some((_, pos)) => cfg.positions.push(*pos),
            None => return Err(err(0, format!("node {} has no initial position", i))),
        }
    }
    // derive the hello window from the base interval unless overridden
    if hello_interval_set && !min_hello_set {
        cfg.aodv.min_hello_interval = 0.75 * cfg.aodv.hello_interval;
    }
    if hello_interval_set && !max_hello_set {
        cfg.aodv.max_hello_interval = 1.25 * cfg.aodv.hello_interval;
    }
    cfg.validate().map_err(|m| err(0, m))?;
    Ok(cfg)
}

/// The three-node reference scenario: field, positions, and the three
/// setdest commands as in the original example, with a CBR flow from
/// node 0 to node 1 standing in for the FTP transfer.
pub const REFERENCE_SCENARIO: &str = include_str!("../../../scenarios/appendix-3node.scn");
