//! Scenario description: field, nodes, motion, traffic, and protocol
//! constant overrides. The text file format lives in the companion crate;
//! this is the validated in-memory form.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::agent::AodvConfig;
use crate::medium::{MotionEvent, Position};
use crate::packet::NodeId;
use crate::time::Time;

/// A constant-bit-rate flow: `rate` packets of `payload` bytes per second
/// from `src` to `dst`, emitted in `[start, stop)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FlowSpec {
    pub src: NodeId,
    pub dst: NodeId,
    pub rate: f64,
    pub payload: u32,
    pub start: Time,
    pub stop: Time,
}

/// A full simulation setup.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub node_count: u16,
    pub field_x: f64,
    pub field_y: f64,
    pub stop: Time,
    pub range: f64,
    pub per_hop_delay: f64,
    pub seed: u64,
    pub link_layer_detection: bool,
    pub positions: Vec<Position>,
    pub motions: Vec<MotionEvent>,
    pub flows: Vec<FlowSpec>,
    pub aodv: AodvConfig,
}

impl Default for ScenarioConfig {
    fn default() -> ScenarioConfig {
        ScenarioConfig {
            node_count: 0,
            field_x: 500.0,
            field_y: 400.0,
            stop: Time::from_secs(150.0),
            range: 250.0,
            per_hop_delay: 0.002,
            seed: 0,
            link_layer_detection: true,
            positions: Vec::new(),
            motions: Vec::new(),
            flows: Vec::new(),
            aodv: AodvConfig::default(),
        }
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl ScenarioConfig {
    /// Convenience constructor for a static field of nodes with default
    /// protocol constants.
    pub fn with_positions(positions: Vec<(f64, f64)>) -> ScenarioConfig {
        let positions: Vec<Position> = positions
            .into_iter()
            .map(|(x, y)| Position::new(x, y))
            .collect();
        ScenarioConfig {
            node_count: positions.len() as u16,
            positions,
            ..ScenarioConfig::default()
        }
    }

    /// Checks the cross-field invariants. The text parser reports these
    /// with line numbers; this covers programmatic construction.
    pub fn validate(&self) -> Result<(), String> {
        if self.node_count == 0 {
            return Err("scenario needs at least one node".into());
        }
        if self.positions.len() != self.node_count as usize {
            return Err(format!(
                "expected {} initial positions, found {}",
                self.node_count,
                self.positions.len()
            ));
        }
        for (i, p) in self.positions.iter().enumerate() {
            if p.x < 0.0 || p.x > self.field_x || p.y < 0.0 || p.y > self.field_y {
                return Err(format!("node {} starts outside the field", i));
            }
        }
        for m in &self.motions {
            if m.node.0 >= self.node_count {
                return Err(format!("motion refers to unknown node {}", m.node));
            }
            if !positive(m.speed) {
                return Err(format!("motion for node {} needs positive speed", m.node));
            }
            if m.dest.x < 0.0 || m.dest.x > self.field_x || m.dest.y < 0.0 || m.dest.y > self.field_y
            {
                return Err(format!("motion for node {} leaves the field", m.node));
            }
        }
        for f in &self.flows {
            if f.src.0 >= self.node_count || f.dst.0 >= self.node_count {
                return Err(format!("flow {} -> {} refers to unknown node", f.src, f.dst));
            }
            if f.src == f.dst {
                return Err(format!("flow {} -> {} sends to itself", f.src, f.dst));
            }
            if !positive(f.rate) {
                return Err(format!("flow {} -> {} needs positive rate", f.src, f.dst));
            }
            if f.start >= f.stop {
                return Err(format!("flow {} -> {} must start before it stops", f.src, f.dst));
            }
            if f.stop > self.stop {
                return Err(format!(
                    "flow {} -> {} runs past the simulation end",
                    f.src, f.dst
                ));
            }
        }
        if self.aodv.min_hello_interval > self.aodv.max_hello_interval {
            return Err("min_hello_interval exceeds max_hello_interval".into());
        }
        for (name, v) in [
            ("hello_interval", self.aodv.hello_interval),
            ("min_hello_interval", self.aodv.min_hello_interval),
            ("max_hello_interval", self.aodv.max_hello_interval),
            ("bcast_id_save", self.aodv.bcast_id_save),
            ("frequency", self.aodv.frequency),
            ("active_route_timeout", self.aodv.active_route_timeout),
            ("my_route_timeout", self.aodv.my_route_timeout),
            ("delete_period", self.aodv.delete_period),
            ("rreq_retry_base", self.aodv.rreq_retry_base),
            ("per_hop_delay", self.per_hop_delay),
            ("range", self.range),
        ] {
            if !positive(v) {
                return Err(format!("{} must be positive", name));
            }
        }
        Ok(())
    }
}
