//! Trace records: one per send/receive/forward/drop event, mirroring the
//! columns of the NS-2 wireless trace line. The text rendering and parser
//! live in the companion crate; the simulation emits these structs.

use alloc::string::String;
use alloc::vec::Vec;

use crate::packet::{Addr, NodeId};

/// Column 1: what happened.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Send,
    Receive,
    Drop,
    Forward,
}

impl TraceEvent {
    pub fn symbol(self) -> char {
        match self {
            TraceEvent::Send => 's',
            TraceEvent::Receive => 'r',
            TraceEvent::Drop => 'D',
            TraceEvent::Forward => 'f',
        }
    }

    pub fn from_symbol(c: char) -> Option<TraceEvent> {
        match c {
            's' => Some(TraceEvent::Send),
            'r' => Some(TraceEvent::Receive),
            'D' => Some(TraceEvent::Drop),
            'f' => Some(TraceEvent::Forward),
            _ => None,
        }
    }
}

/// Column 4: the layer the event happened at. Only AGT and RTR are
/// emitted by this simulator; the rest parse for compatibility.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TraceLayer {
    Agt,
    Rtr,
    Ll,
    Ifq,
    Mac,
    Phy,
}

impl TraceLayer {
    pub fn name(self) -> &'static str {
        match self {
            TraceLayer::Agt => "AGT",
            TraceLayer::Rtr => "RTR",
            TraceLayer::Ll => "LL",
            TraceLayer::Ifq => "IFQ",
            TraceLayer::Mac => "MAC",
            TraceLayer::Phy => "PHY",
        }
    }

    pub fn from_name(s: &str) -> Option<TraceLayer> {
        match s {
            "AGT" => Some(TraceLayer::Agt),
            "RTR" => Some(TraceLayer::Rtr),
            "LL" => Some(TraceLayer::Ll),
            "IFQ" => Some(TraceLayer::Ifq),
            "MAC" => Some(TraceLayer::Mac),
            "PHY" => Some(TraceLayer::Phy),
            _ => None,
        }
    }
}

/// Column 9: [duration dstMAC srcMAC ethertype], all rendered in hex.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub struct MacInfo {
    pub duration: u64,
    pub dst_mac: u64,
    pub src_mac: u64,
    pub ethertype: u64,
}

/// MAC broadcast destination, rendered `ffffffff`.
pub const MAC_BROADCAST: u64 = 0xffff_ffff;
/// Ethertype carried on received frames, rendered `800`.
pub const ETHERTYPE_IP: u64 = 0x800;

/// Column 11: [src:sport dst:dport ttl nexthop].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct IpInfo {
    pub src: Addr,
    pub sport: u16,
    pub dst: Addr,
    pub dport: u16,
    pub ttl: u32,
    /// 0 means node 0 or broadcast.
    pub nexthop: u64,
}

/// Column 12: the AODV bracket group, keyed by the leading type code.
#[derive(Clone, Debug, PartialEq)]
pub enum AodvTraceInfo {
    /// `[0x1 hop [rpdst rpseq] lifetime]`
    Hello {
        hop_count: u32,
        rpdst: NodeId,
        rpseq: u32,
        lifetime: f64,
    },
    /// `[0x2 hop bid [dst dstseq] [src srcseq]]`
    Request {
        hop_count: u32,
        bcast_id: u32,
        dst: NodeId,
        dst_seqno: u32,
        src: NodeId,
        src_seqno: u32,
    },
    /// `[0x4 hop [rpdst rpseq] lifetime]`
    Reply {
        hop_count: u32,
        rpdst: NodeId,
        rpseq: u32,
        lifetime: f64,
    },
    /// `[0x8 count [dst seq] ...]`
    Error { dests: Vec<(NodeId, u32)> },
}

impl AodvTraceInfo {
    /// Parenthesized name at the end of the line.
    pub fn label(&self) -> &'static str {
        match self {
            AodvTraceInfo::Hello { .. } => "HELLO",
            AodvTraceInfo::Request { .. } => "REQUEST",
            AodvTraceInfo::Reply { .. } => "REPLY",
            AodvTraceInfo::Error { .. } => "ERROR",
        }
    }
}

/// One parsed or emitted trace line.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub event: TraceEvent,
    /// Seconds, quantized to the trace's nine decimals.
    pub time: f64,
    pub node: NodeId,
    pub layer: TraceLayer,
    /// Drop reason token; `None` renders as the `---` flags column.
    pub reason: Option<String>,
    /// Data packets carry their unique id here; control packets show 0.
    pub seq: u64,
    pub ptype: String,
    pub size: u32,
    pub mac: MacInfo,
    pub ip: IpInfo,
    pub aodv: Option<AodvTraceInfo>,
    pub label: Option<String>,
}
