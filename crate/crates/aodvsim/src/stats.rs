//! Trace analysis: delivery accounting, drop breakdown, control
//! overhead, and per-type AODV counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use aodvsim_core::trace::{TraceEvent, TraceLayer, TraceRecord};

/// A ratio that is meaningless when its denominator is zero.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Ratio {
    Undefined,
    Value(f64),
}

impl Ratio {
    fn of(num: f64, den: f64) -> Ratio {
        if den == 0.0 {
            Ratio::Undefined
        } else {
            Ratio::Value(num / den)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::Undefined => None,
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Undefined => write!(f, "undefined"),
            Ratio::Value(v) => write!(f, "{:.6}", v),
        }
    }
}

/// Aggregate numbers for one trace.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsReport {
    /// Data packets handed down by traffic sources (`s` at AGT).
    pub originated: u64,
    /// Data packets delivered to their destination (`r` at AGT).
    pub delivered: u64,
    /// Every `D` record by reason token, control drops included.
    pub dropped_by_reason: BTreeMap<String, u64>,
    /// `D` records for data packets only.
    pub dropped_data: u64,
    /// delivered / originated.
    pub delivery_ratio: Ratio,
    /// AODV transmissions (`s` and `f`) per delivered data packet.
    pub control_overhead: Ratio,
    /// Mean hops taken by delivered data packets (1 = direct neighbor).
    pub mean_hops: Ratio,
    /// Records labeled HELLO / REQUEST / REPLY / ERROR, any event kind.
    pub aodv_counts: BTreeMap<String, u64>,
}

impl StatsReport {
    pub fn dropped_total(&self) -> u64 {
        self.dropped_by_reason.values().sum()
    }

    /// Machine-readable key=value lines.
    pub fn machine_lines(&self) -> String {
        let mut out = String::new();
        writeln!(out, "originated={}", self.originated).unwrap();
        writeln!(out, "delivered={}", self.delivered).unwrap();
        writeln!(out, "dropped={}", self.dropped_total()).unwrap();
        writeln!(out, "dropped_data={}", self.dropped_data).unwrap();
        for (reason, count) in &self.dropped_by_reason {
            writeln!(out, "dropped.{}={}", reason, count).unwrap();
        }
        writeln!(out, "delivery_ratio={}", self.delivery_ratio).unwrap();
        writeln!(out, "control_overhead={}", self.control_overhead).unwrap();
        writeln!(out, "mean_hops={}", self.mean_hops).unwrap();
        for label in ["HELLO", "REQUEST", "REPLY", "ERROR"] {
            let count = self.aodv_counts.get(label).copied().unwrap_or(0);
            writeln!(out, "aodv.{}={}", label.to_lowercase(), count).unwrap();
        }
        out
    }

    /// Human-readable table.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:<22} {:>12}", "metric", "value").unwrap();
        writeln!(out, "{:<22} {:>12}", "----------------------", "------------").unwrap();
        writeln!(out, "{:<22} {:>12}", "data originated", self.originated).unwrap();
        writeln!(out, "{:<22} {:>12}", "data delivered", self.delivered).unwrap();
        writeln!(out, "{:<22} {:>12}", "dropped (all)", self.dropped_total()).unwrap();
        for (reason, count) in &self.dropped_by_reason {
            writeln!(out, "{:<22} {:>12}", format!("  {}", reason), count).unwrap();
        }
        writeln!(out, "{:<22} {:>12}", "delivery ratio", self.delivery_ratio.to_string()).unwrap();
        writeln!(out, "{:<22} {:>12}", "control overhead", self.control_overhead.to_string())
            .unwrap();
        writeln!(out, "{:<22} {:>12}", "mean hop count", self.mean_hops.to_string()).unwrap();
        for label in ["HELLO", "REQUEST", "REPLY", "ERROR"] {
            let count = self.aodv_counts.get(label).copied().unwrap_or(0);
            writeln!(out, "{:<22} {:>12}", format!("aodv {}", label), count).unwrap();
        }
        out
    }
}

/// Computes the report over parsed records.
pub fn compute(records: &[TraceRecord]) -> StatsReport {
    let mut originated = 0u64;
    let mut delivered = 0u64;
    let mut dropped_by_reason: BTreeMap<String, u64> = BTreeMap::new();
    let mut dropped_data = 0u64;
    let mut aodv_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut control_tx = 0u64;
    // uid -> forwards seen, for hop counting of delivered packets
    let mut forwards: BTreeMap<u64, u64> = BTreeMap::new();
    let mut delivered_uids: Vec<u64> = Vec::new();

    for rec in records {
        let is_data = rec.ptype != "AODV";
        match rec.event {
            TraceEvent::Send if rec.layer == TraceLayer::Agt && is_data => originated += 1,
            TraceEvent::Receive if rec.layer == TraceLayer::Agt && is_data => {
                delivered += 1;
                delivered_uids.push(rec.seq);
            }
            TraceEvent::Drop => {
                let reason = rec.reason.clone().unwrap_or_else(|| "?".to_string());
                *dropped_by_reason.entry(reason).or_default() += 1;
                if is_data {
                    dropped_data += 1;
                }
            }
            _ => {}
        }
        if !is_data && matches!(rec.event, TraceEvent::Send | TraceEvent::Forward) {
            control_tx += 1;
        }
        if is_data && rec.event == TraceEvent::Forward && rec.layer == TraceLayer::Rtr {
            *forwards.entry(rec.seq).or_default() += 1;
        }
        if let Some(label) = &rec.label {
            *aodv_counts.entry(label.clone()).or_default() += 1;
        }
    }

    let total_hops: u64 = delivered_uids
        .iter()
        .map(|uid| 1 + forwards.get(uid).copied().unwrap_or(0))
        .sum();

    StatsReport {
        originated,
        delivered,
        dropped_by_reason,
        dropped_data,
        delivery_ratio: Ratio::of(delivered as f64, originated as f64),
        control_overhead: Ratio::of(control_tx as f64, delivered as f64),
        mean_hops: Ratio::of(total_hops as f64, delivered as f64),
        aodv_counts,
    }
}
