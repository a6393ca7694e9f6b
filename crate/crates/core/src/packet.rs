//! Simulated packets and the AODV wire headers they carry.

use alloc::vec::Vec;
use core::fmt;

/// Identifier of a node in the scenario.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u16);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An IP-level address: a node or the broadcast address (traced as -1).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Addr {
    Node(NodeId),
    Broadcast,
}

impl Addr {
    pub fn node(self) -> Option<NodeId> {
        match self {
            Addr::Node(id) => Some(id),
            Addr::Broadcast => None,
        }
    }

    pub fn is_broadcast(self) -> bool {
        matches!(self, Addr::Broadcast)
    }
}

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Addr::Node(id) => write!(f, "{}", id),
            Addr::Broadcast => write!(f, "-1"),
        }
    }
}

/// Routing-agent port used by all AODV control traffic.
pub const AODV_PORT: u16 = 255;
/// Port used by the data traffic generator.
pub const DATA_PORT: u16 = 0;

/// The AODV control headers. HELLO is reply-shaped on the wire but keeps
/// its own tag here because reception handles it separately.
#[derive(Clone, Debug, PartialEq)]
pub enum AodvHeader {
    Hello {
        hop_count: u32,
        rpdst: NodeId,
        rpseq: u32,
        lifetime: f64,
    },
    Request {
        hop_count: u32,
        bcast_id: u32,
        dst: NodeId,
        dst_seqno: u32,
        src: NodeId,
        src_seqno: u32,
        timestamp: f64,
    },
    Reply {
        hop_count: u32,
        rpdst: NodeId,
        rpseq: u32,
        lifetime: f64,
        timestamp: f64,
    },
    /// Unreachable destinations with their invalidated sequence numbers;
    /// DestCount is the list length.
    Error { dests: Vec<(NodeId, u32)> },
    /// A type code the dispatcher does not know; dropped and traced.
    Unknown { code: u8 },
}

impl AodvHeader {
    /// Wire type code, as shown in the trace bracket group.
    pub fn type_code(&self) -> u8 {
        match self {
            AodvHeader::Hello { .. } => 0x1,
            AodvHeader::Request { .. } => 0x2,
            AodvHeader::Reply { .. } => 0x4,
            AodvHeader::Error { .. } => 0x8,
            AodvHeader::Unknown { code } => *code,
        }
    }
}

/// Packet payload: AODV control or generated data.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Aodv(AodvHeader),
    /// Constant-bit-rate data payload.
    Cbr { flow: u32, bytes: u32 },
}

/// A packet in flight, including the simulated IP header fields the trace
/// format exposes.
#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    /// Globally unique id; data packets show it in the trace seq column.
    pub uid: u64,
    pub src: NodeId,
    pub sport: u16,
    pub dst: Addr,
    pub dport: u16,
    pub ttl: u32,
    /// Next hop of the most recent unicast transmission (None while
    /// broadcast or not yet routed). Traced as 0 when absent.
    pub nexthop: Option<NodeId>,
    /// How many times a node other than the source has transmitted this
    /// packet; drives the local-repair decision on link failure.
    pub num_forwards: u16,
    pub payload: Payload,
}

impl Packet {
    pub fn aodv(uid: u64, src: NodeId, dst: Addr, ttl: u32, header: AodvHeader) -> Packet {
        Packet {
            uid,
            src,
            sport: AODV_PORT,
            dst,
            dport: AODV_PORT,
            ttl,
            nexthop: None,
            num_forwards: 0,
            payload: Payload::Aodv(header),
        }
    }

    pub fn data(uid: u64, src: NodeId, dst: NodeId, ttl: u32, flow: u32, bytes: u32) -> Packet {
        Packet {
            uid,
            src,
            sport: DATA_PORT,
            dst: Addr::Node(dst),
            dport: DATA_PORT,
            ttl,
            nexthop: None,
            num_forwards: 0,
            payload: Payload::Cbr { flow, bytes },
        }
    }

    pub fn is_data(&self) -> bool {
        matches!(self.payload, Payload::Cbr { .. })
    }

    pub fn aodv_header(&self) -> Option<&AodvHeader> {
        match &self.payload {
            Payload::Aodv(h) => Some(h),
            Payload::Cbr { .. } => None,
        }
    }

    /// Traced size at the routing layer: data gains a 20-byte IP header,
    /// control sizes match the NS-2 wireless trace (HELLO/REPLY 44,
    /// REQUEST 48, ERROR 20 + 4*(2*DestCount + 1)).
    pub fn size_at_rtr(&self) -> u32 {
        match &self.payload {
            Payload::Cbr { bytes, .. } => bytes + 20,
            Payload::Aodv(h) => match h {
                AodvHeader::Hello { .. } | AodvHeader::Reply { .. } => 44,
                AodvHeader::Request { .. } => 48,
                AodvHeader::Error { dests } => 20 + 4 * (2 * dests.len() as u32 + 1),
                AodvHeader::Unknown { .. } => 44,
            },
        }
    }

    /// Traced size at the application layer (payload only).
    pub fn size_at_agt(&self) -> u32 {
        match &self.payload {
            Payload::Cbr { bytes, .. } => *bytes,
            Payload::Aodv(_) => self.size_at_rtr(),
        }
    }
}
