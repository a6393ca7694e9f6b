//! The simulation proper: owns the kernel, the medium, one agent per
//! node, and the trace record stream.
//!
//! Everything observable happens here. Agent effects become kernel
//! events; transmissions consult the medium for who hears them; data
//! packets addressed to a node are delivered to its application layer
//! rather than its routing agent.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::agent::{AodvAgent, DropReason, Effect, TimerKind, TxDest};
use crate::kernel::EventQueue;
use crate::medium::{Medium, LINK_FAILURE_DETECT_DELAY};
use crate::packet::{Addr, AodvHeader, NodeId, Packet, Payload};
use crate::rng::RandomSource;
use crate::scenario::{FlowSpec, ScenarioConfig};
use crate::time::Time;
use crate::trace::{
    AodvTraceInfo, IpInfo, MacInfo, TraceEvent, TraceLayer, TraceRecord, ETHERTYPE_IP,
    MAC_BROADCAST,
};

/// Everything the event loop can be asked to do.
pub enum SimEvent {
    Timer { node: NodeId, kind: TimerKind },
    /// A packet leaves `from` (after any send delay such as jitter).
    Transmit {
        from: NodeId,
        pkt: Packet,
        dest: TxDest,
    },
    /// A transmitted copy arrives at `to`.
    Deliver {
        from: NodeId,
        to: NodeId,
        pkt: Packet,
    },
    /// The link layer gave up on a unicast after its retries.
    TxFailed { node: NodeId, pkt: Packet },
    /// The CBR source of flow `flow` emits its next packet.
    TrafficEmit { flow: usize },
}

/// A complete, runnable simulation instance.
pub struct Simulation {
    kernel: EventQueue<SimEvent>,
    rng: RandomSource,
    medium: Medium,
    agents: Vec<AodvAgent>,
    flows: Vec<FlowSpec>,
    link_layer_detection: bool,
    stop: Time,
    records: Vec<TraceRecord>,
    next_uid: u64,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Result<Simulation, String> {
        cfg.validate()?;
        let medium = Medium::new(
            cfg.positions.clone(),
            &cfg.motions,
            cfg.range,
            cfg.per_hop_delay,
        );
        let agents: Vec<AodvAgent> = (0..cfg.node_count)
            .map(|i| AodvAgent::new(NodeId(i), cfg.aodv.clone(), cfg.link_layer_detection))
            .collect();
        let mut sim = Simulation {
            kernel: EventQueue::new(),
            rng: RandomSource::new(cfg.seed),
            medium,
            agents,
            flows: cfg.flows.clone(),
            link_layer_detection: cfg.link_layer_detection,
            stop: cfg.stop,
            records: Vec::new(),
            next_uid: 1,
        };
        for i in 0..sim.agents.len() {
            let node = NodeId(i as u16);
            sim.agents[i].start().map_err(|e| e.to_string())?;
            sim.execute_effects(node, Time::ZERO);
        }
        for (i, flow) in sim.flows.clone().into_iter().enumerate() {
            sim.kernel
                .schedule(flow.start.secs(), SimEvent::TrafficEmit { flow: i })
                .expect("scheduling at construction");
        }
        Ok(sim)
    }

    pub fn now(&self) -> Time {
        self.kernel.now()
    }

    pub fn stop_time(&self) -> Time {
        self.stop
    }

    pub fn node_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent(&self, node: NodeId) -> &AodvAgent {
        &self.agents[node.0 as usize]
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<TraceRecord> {
        self.records
    }

    /// Fires one due event, returning its time. `None` once nothing
    /// remains before the stop time.
    pub fn step(&mut self) -> Option<Time> {
        let (t, ev) = self.kernel.pop_next(self.stop)?;
        self.dispatch(t, ev);
        Some(t)
    }

    /// Processes every event due by `t_end` and leaves the clock there.
    /// Returns the number of events fired.
    pub fn run_until(&mut self, t_end: Time) -> usize {
        let mut fired = 0;
        while let Some((t, ev)) = self.kernel.pop_next(t_end) {
            self.dispatch(t, ev);
            fired += 1;
        }
        self.kernel.advance_to(t_end);
        fired
    }

    /// Runs to the configured stop time and closes the schedule.
    pub fn run(&mut self) -> usize {
        let stop = self.stop;
        let fired = self.run_until(stop);
        self.kernel.terminate();
        fired
    }

    fn dispatch(&mut self, t: Time, ev: SimEvent) {
        match ev {
            SimEvent::Timer { node, kind } => {
                self.agents[node.0 as usize].handle_timer(kind, t, &mut self.rng);
                self.execute_effects(node, t);
            }
            SimEvent::Transmit { from, pkt, dest } => self.transmit(from, pkt, dest, t),
            SimEvent::Deliver { from, to, pkt } => self.deliver(from, to, pkt, t),
            SimEvent::TxFailed { node, pkt } => {
                self.agents[node.0 as usize].rt_ll_failed(pkt, t, &mut self.rng);
                self.execute_effects(node, t);
            }
            SimEvent::TrafficEmit { flow } => self.emit_traffic(flow, t),
        }
    }

    fn execute_effects(&mut self, node: NodeId, t: Time) {
        let effects = self.agents[node.0 as usize].take_effects();
        for effect in effects {
            match effect {
                Effect::Transmit { pkt, dest, delay } => {
                    self.kernel
                        .schedule(delay, SimEvent::Transmit { from: node, pkt, dest })
                        .expect("agent transmit");
                }
                Effect::ArmTimer { kind, delay } => {
                    self.kernel
                        .schedule(delay, SimEvent::Timer { node, kind })
                        .expect("agent timer");
                }
                Effect::Drop { pkt, reason } => {
                    self.records.push(drop_record(node, &pkt, reason, t));
                }
            }
        }
    }

    /// A transmission leaves the radio: trace it, then either fan copies
    /// out to everyone in range or carry the unicast to its next hop. An
    /// out-of-range next hop surfaces as a link-layer failure callback
    /// after the retry window when detection is on, and as silence
    /// otherwise.
    fn transmit(&mut self, from: NodeId, pkt: Packet, dest: TxDest, t: Time) {
        self.records.push(transmit_record(from, &pkt, t));
        let delay = self.medium.per_hop_delay();
        match dest {
            TxDest::Broadcast => {
                for to in self.medium.receivers(from, t) {
                    self.kernel
                        .schedule(delay, SimEvent::Deliver { from, to, pkt: pkt.clone() })
                        .expect("broadcast delivery");
                }
            }
            TxDest::Unicast(to) => {
                if self.medium.in_range(from, to, t) {
                    self.kernel
                        .schedule(delay, SimEvent::Deliver { from, to, pkt })
                        .expect("unicast delivery");
                } else if self.link_layer_detection {
                    self.kernel
                        .schedule(
                            LINK_FAILURE_DETECT_DELAY,
                            SimEvent::TxFailed { node: from, pkt },
                        )
                        .expect("failure callback");
                }
                // detection off: the packet is silently lost
            }
        }
    }

    fn deliver(&mut self, from: NodeId, to: NodeId, pkt: Packet, t: Time) {
        self.records.push(receive_record(to, from, &pkt, t));
        if pkt.is_data() && pkt.dst == Addr::Node(to) {
            // reached its destination: hand up to the application layer
            self.records.push(agt_receive_record(to, from, &pkt, t));
            return;
        }
        self.agents[to.0 as usize].recv(pkt, Some(from), t, &mut self.rng);
        self.execute_effects(to, t);
    }

    fn emit_traffic(&mut self, flow: usize, t: Time) {
        let f = self.flows[flow];
        if t >= f.stop {
            return;
        }
        let uid = self.next_uid;
        self.next_uid += 1;
        let ttl = self.agents[f.src.0 as usize].config().network_diameter;
        let pkt = Packet::data(uid, f.src, f.dst, ttl, flow as u32, f.payload);
        self.records.push(agt_send_record(f.src, &pkt, t));
        self.agents[f.src.0 as usize].recv(pkt, None, t, &mut self.rng);
        self.execute_effects(f.src, t);
        let gap = 1.0 / f.rate;
        if (t + gap) < f.stop {
            self.kernel
                .schedule(gap, SimEvent::TrafficEmit { flow })
                .expect("traffic emission");
        }
    }
}

fn quantize6(x: f64) -> f64 {
    libm::round(x * 1e6) / 1e6
}

fn ptype_of(pkt: &Packet) -> String {
    match pkt.payload {
        Payload::Aodv(_) => "AODV".into(),
        Payload::Cbr { .. } => "cbr".into(),
    }
}

fn trace_seq(pkt: &Packet) -> u64 {
    if pkt.is_data() {
        pkt.uid
    } else {
        0
    }
}

fn ip_info(pkt: &Packet) -> IpInfo {
    IpInfo {
        src: Addr::Node(pkt.src),
        sport: pkt.sport,
        dst: pkt.dst,
        dport: pkt.dport,
        ttl: pkt.ttl,
        nexthop: pkt.nexthop.map_or(0, |n| n.0 as u64),
    }
}

/// The AODV bracket group for a packet. Route requests display their hop
/// count one higher than the wire value, matching the reference traces
/// where the originator's own send already shows hop 1.
fn aodv_info(pkt: &Packet) -> Option<AodvTraceInfo> {
    match pkt.aodv_header()? {
        AodvHeader::Hello {
            hop_count,
            rpdst,
            rpseq,
            lifetime,
        } => Some(AodvTraceInfo::Hello {
            hop_count: *hop_count,
            rpdst: *rpdst,
            rpseq: *rpseq,
            lifetime: quantize6(*lifetime),
        }),
        AodvHeader::Request {
            hop_count,
            bcast_id,
            dst,
            dst_seqno,
            src,
            src_seqno,
            ..
        } => Some(AodvTraceInfo::Request {
            hop_count: hop_count + 1,
            bcast_id: *bcast_id,
            dst: *dst,
            dst_seqno: *dst_seqno,
            src: *src,
            src_seqno: *src_seqno,
        }),
        AodvHeader::Reply {
            hop_count,
            rpdst,
            rpseq,
            lifetime,
            ..
        } => Some(AodvTraceInfo::Reply {
            hop_count: *hop_count,
            rpdst: *rpdst,
            rpseq: *rpseq,
            lifetime: quantize6(*lifetime),
        }),
        AodvHeader::Error { dests } => Some(AodvTraceInfo::Error {
            dests: dests.clone(),
        }),
        AodvHeader::Unknown { .. } => None,
    }
}

fn label_of(pkt: &Packet) -> Option<String> {
    aodv_info(pkt).map(|i| i.label().into())
}

/// RTR-layer record for a packet leaving `node`; `s` for packets whose
/// IP source is the node itself, `f` for relayed ones.
pub fn transmit_record(node: NodeId, pkt: &Packet, t: Time) -> TraceRecord {
    let event = if pkt.src == node {
        TraceEvent::Send
    } else {
        TraceEvent::Forward
    };
    TraceRecord {
        event,
        time: t.quantized(),
        node,
        layer: TraceLayer::Rtr,
        reason: None,
        seq: trace_seq(pkt),
        ptype: ptype_of(pkt),
        size: pkt.size_at_rtr(),
        mac: MacInfo::default(),
        ip: ip_info(pkt),
        aodv: aodv_info(pkt),
        label: label_of(pkt),
    }
}

/// RTR-layer record for a packet arriving at `node` from `from`. The MAC
/// group shows the broadcast destination or the receiver, the sender, and
/// the IP ethertype.
pub fn receive_record(node: NodeId, from: NodeId, pkt: &Packet, t: Time) -> TraceRecord {
    TraceRecord {
        event: TraceEvent::Receive,
        time: t.quantized(),
        node,
        layer: TraceLayer::Rtr,
        reason: None,
        seq: trace_seq(pkt),
        ptype: ptype_of(pkt),
        size: pkt.size_at_rtr(),
        mac: MacInfo {
            duration: 0,
            dst_mac: pkt.nexthop.map_or(MAC_BROADCAST, |n| n.0 as u64),
            src_mac: from.0 as u64,
            ethertype: ETHERTYPE_IP,
        },
        ip: ip_info(pkt),
        aodv: aodv_info(pkt),
        label: label_of(pkt),
    }
}

/// AGT-layer record for a data packet handed down by its traffic source.
pub fn agt_send_record(node: NodeId, pkt: &Packet, t: Time) -> TraceRecord {
    TraceRecord {
        event: TraceEvent::Send,
        time: t.quantized(),
        node,
        layer: TraceLayer::Agt,
        reason: None,
        seq: trace_seq(pkt),
        ptype: ptype_of(pkt),
        size: pkt.size_at_agt(),
        mac: MacInfo::default(),
        ip: ip_info(pkt),
        aodv: None,
        label: None,
    }
}

/// AGT-layer record for a data packet delivered to its destination.
pub fn agt_receive_record(node: NodeId, from: NodeId, pkt: &Packet, t: Time) -> TraceRecord {
    TraceRecord {
        event: TraceEvent::Receive,
        time: t.quantized(),
        node,
        layer: TraceLayer::Agt,
        reason: None,
        seq: trace_seq(pkt),
        ptype: ptype_of(pkt),
        size: pkt.size_at_agt(),
        mac: MacInfo {
            duration: 0,
            dst_mac: pkt.nexthop.map_or(MAC_BROADCAST, |n| n.0 as u64),
            src_mac: from.0 as u64,
            ethertype: ETHERTYPE_IP,
        },
        ip: ip_info(pkt),
        aodv: None,
        label: None,
    }
}

/// RTR-layer drop record carrying its reason token.
pub fn drop_record(node: NodeId, pkt: &Packet, reason: DropReason, t: Time) -> TraceRecord {
    TraceRecord {
        event: TraceEvent::Drop,
        time: t.quantized(),
        node,
        layer: TraceLayer::Rtr,
        reason: Some(reason.token().into()),
        seq: trace_seq(pkt),
        ptype: ptype_of(pkt),
        size: pkt.size_at_rtr(),
        mac: MacInfo::default(),
        ip: ip_info(pkt),
        aodv: aodv_info(pkt),
        label: label_of(pkt),
    }
}
