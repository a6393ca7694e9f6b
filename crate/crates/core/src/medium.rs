//! Unit-disk wireless medium and node mobility.
//!
//! Connectivity is purely geometric: two nodes can hear each other iff
//! their Euclidean distance at the transmit instant is within `range`
//! (boundary inclusive). Every delivery takes one fixed per-hop delay.
//! Positions follow the scenario's motion commands by piecewise-linear
//! interpolation, so they are exact functions of time.

use alloc::vec::Vec;

use crate::packet::NodeId;
use crate::time::Time;

/// How long a failed unicast takes to surface as a link-layer callback:
/// three retry attempts spaced 30 ms apart.
pub const LINK_FAILURE_RETRIES: u32 = 3;
pub const LINK_FAILURE_RETRY_SPACING: f64 = 0.03;
pub const LINK_FAILURE_DETECT_DELAY: f64 = LINK_FAILURE_RETRIES as f64 * LINK_FAILURE_RETRY_SPACING;

/// A planar position in meters (z is fixed at 0).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Position {
        Position { x, y }
    }

    pub fn distance(self, other: Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        libm::sqrt(dx * dx + dy * dy)
    }
}

/// A `setdest` command: at time `at`, `node` heads for `dest` at `speed`
/// meters per second and stops on arrival (or when retargeted).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MotionEvent {
    pub at: Time,
    pub node: NodeId,
    pub dest: Position,
    pub speed: f64,
}

/// The medium: geometry plus the delivery constants.
pub struct Medium {
    range: f64,
    per_hop_delay: f64,
    initial: Vec<Position>,
    /// Per-node motion commands sorted by activation time.
    motions: Vec<Vec<MotionEvent>>,
}

impl Medium {
    pub fn new(
        initial: Vec<Position>,
        motion_events: &[MotionEvent],
        range: f64,
        per_hop_delay: f64,
    ) -> Medium {
        let mut motions: Vec<Vec<MotionEvent>> = initial.iter().map(|_| Vec::new()).collect();
        for ev in motion_events {
            motions[ev.node.0 as usize].push(*ev);
        }
        for per_node in &mut motions {
            per_node.sort_by_key(|m| m.at);
        }
        Medium {
            range,
            per_hop_delay,
            initial,
            motions,
        }
    }

    pub fn node_count(&self) -> usize {
        self.initial.len()
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn per_hop_delay(&self) -> f64 {
        self.per_hop_delay
    }

    /// Position of `node` at time `t`: stationary until its first motion
    /// command, then straight-line legs clamped at each destination.
    pub fn position_at(&self, node: NodeId, t: Time) -> Position {
        let mut pos = self.initial[node.0 as usize];
        let mut leg: Option<(Time, Position, f64)> = None; // (start time, target, speed)
        for ev in &self.motions[node.0 as usize] {
            if ev.at > t {
                break;
            }
            // close out the previous leg at this command's activation
            if let Some((since, target, speed)) = leg {
                pos = advance(pos, target, speed, ev.at - since);
            }
            leg = Some((ev.at, ev.dest, ev.speed));
        }
        match leg {
            Some((since, target, speed)) => advance(pos, target, speed, t - since),
            None => pos,
        }
    }

    /// Whether `a` and `b` can hear each other at `t` (inclusive range).
    pub fn in_range(&self, a: NodeId, b: NodeId, t: Time) -> bool {
        self.position_at(a, t).distance(self.position_at(b, t)) <= self.range
    }

    /// Every node that hears a broadcast transmitted by `from` at `t`.
    pub fn receivers(&self, from: NodeId, t: Time) -> Vec<NodeId> {
        (0..self.node_count() as u16)
            .map(NodeId)
            .filter(|&to| to != from && self.in_range(from, to, t))
            .collect()
    }
}

fn advance(from: Position, target: Position, speed: f64, elapsed: f64) -> Position {
    if elapsed <= 0.0 {
        return from;
    }
    let dist = from.distance(target);
    let travelled = speed * elapsed;
    if travelled >= dist || dist == 0.0 {
        return target;
    }
    let frac = travelled / dist;
    Position::new(
        from.x + (target.x - from.x) * frac,
        from.y + (target.y - from.y) * frac,
    )
}
