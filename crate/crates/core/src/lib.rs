//! Deterministic discrete-event simulator for mobile ad-hoc networks with
//! a complete AODV routing agent.
//!
//! The crate is `no_std` (alloc only) and performs no I/O: a simulation
//! consumes a [`scenario::ScenarioConfig`] and produces a sequence of
//! [`trace::TraceRecord`]s. The companion `aodvsim` crate renders those
//! records in the NS-2 wireless trace text format and provides the CLI.
//!
//! Given the same seed and scenario, a run is reproducible down to the
//! byte on any platform: the event queue breaks time ties in insertion
//! order, all table iteration is ordered, and randomness comes from a
//! fixed xoshiro256++ generator rather than anything platform-provided.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agent;
pub mod kernel;
pub mod medium;
pub mod packet;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod tables;
pub mod time;
pub mod trace;

pub use agent::{AodvAgent, AodvConfig, DropReason, Effect, TimerKind, TxDest};
pub use kernel::EventQueue;
pub use medium::{Medium, MotionEvent, Position};
pub use packet::{Addr, AodvHeader, NodeId, Packet, Payload};
pub use rng::RandomSource;
pub use scenario::{FlowSpec, ScenarioConfig};
pub use sim::Simulation;
pub use tables::{AodvTables, RouteEntry, RouteFlag};
pub use time::Time;
pub use trace::{TraceEvent, TraceLayer, TraceRecord};
