//! The per-node AODV agent: packet reception and dispatch, route
//! discovery, route maintenance and repair, and the timer handlers.
//!
//! The agent is a passive state machine. Handlers never touch the medium
//! or the clock directly; they push [`Effect`]s into an outbox that the
//! simulation loop executes, which keeps every handler unit-testable in
//! isolation.

use alloc::vec::Vec;

use crate::packet::{Addr, AodvHeader, NodeId, Packet, Payload};
use crate::rng::RandomSource;
use crate::tables::{AodvTables, Neighbor, RouteEntry, RouteFlag, HOPS_INFINITY};
use crate::time::Time;

/// Runtime protocol constants. The values here are the reference
/// defaults; a scenario file may override any of them.
#[derive(Clone, Debug)]
pub struct AodvConfig {
    /// Periodic HELLO beacons. Disabled by default; link breaks are then
    /// learned from failed unicast transmissions only.
    pub hello_enabled: bool,
    pub hello_interval: f64,
    pub allowed_hello_loss: u32,
    pub min_hello_interval: f64,
    pub max_hello_interval: f64,
    /// Lifetime of a (source, broadcast-id) dedup cache entry, and the
    /// cadence of the broadcast timer that purges the cache.
    pub bcast_id_save: f64,
    /// Cadence of the route-cache purge timer.
    pub frequency: f64,
    /// Hop budget given to flooded route requests (no expanding ring).
    pub network_diameter: u32,
    /// Route-request attempts per discovery before the queue is shed.
    pub rreq_retries: u32,
    pub active_route_timeout: f64,
    /// Lifetime a destination advertises in its own route replies.
    pub my_route_timeout: f64,
    /// How long an invalidated route entry lingers before eviction.
    pub delete_period: f64,
    /// First route-request retry wait; doubles per attempt.
    pub rreq_retry_base: f64,
}

impl Default for AodvConfig {
    fn default() -> AodvConfig {
        AodvConfig {
            hello_enabled: false,
            hello_interval: 1.0,
            allowed_hello_loss: 3,
            min_hello_interval: 0.75,
            max_hello_interval: 1.25,
            bcast_id_save: 6.0,
            frequency: 0.5,
            network_diameter: 30,
            rreq_retries: 3,
            active_route_timeout: 10.0,
            my_route_timeout: 10.0,
            delete_period: 4.5,
            rreq_retry_base: 0.12,
        }
    }
}

/// The five timers of the protocol. `LocalRepair` doubles as the
/// per-destination route-request retry timer, which is what finalizes a
/// repair as success or failure.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TimerKind {
    Broadcast,
    Hello,
    Neighbor,
    RouteCache,
    LocalRepair(NodeId),
}

/// Why a packet was dropped; rendered as the trace reason token.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DropReason {
    /// DROP_RTR_NO_ROUTE
    NoRoute,
    /// DROP_RTR_TTL
    TtlZero,
    /// DROP_RTR_ROUTE_LOOP
    RouteLoop,
    /// DROP_RTR_MAC_CALLBACK
    Callback,
    /// Send-buffer eviction at capacity.
    QueueFull,
    /// Send-buffer per-packet timeout.
    QueueTimeout,
    /// Unrecognized AODV type code.
    UnknownType,
}

impl DropReason {
    pub fn token(self) -> &'static str {
        match self {
            DropReason::NoRoute => "NRTE",
            DropReason::TtlZero => "TTL",
            DropReason::RouteLoop => "LOOP",
            DropReason::Callback => "CBK",
            DropReason::QueueFull => "IFQ",
            DropReason::QueueTimeout => "TOUT",
            DropReason::UnknownType => "UNK",
        }
    }
}

/// Where a transmission is headed.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TxDest {
    Broadcast,
    Unicast(NodeId),
}

/// Side effects a handler asks the simulation to perform.
#[derive(Clone, Debug, PartialEq)]
pub enum Effect {
    /// Hand a packet to the medium after `delay` seconds.
    Transmit {
        pkt: Packet,
        dest: TxDest,
        delay: f64,
    },
    /// Arm a timer for this agent.
    ArmTimer { kind: TimerKind, delay: f64 },
    /// Drop a packet, traced with the given reason.
    Drop { pkt: Packet, reason: DropReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentError {
    AlreadyStarted,
}

impl core::fmt::Display for AgentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AgentError::AlreadyStarted => write!(f, "agent already started"),
        }
    }
}

fn round_up_even(x: u32) -> u32 {
    if x % 2 == 1 {
        x + 1
    } else {
        x
    }
}

/// One AODV routing agent. Own sequence number starts at 2 and stays even
/// at rest; the broadcast-id counter starts at 1 and grows once per
/// originated route request.
pub struct AodvAgent {
    id: NodeId,
    seqno: u32,
    bid: u32,
    tables: AodvTables,
    config: AodvConfig,
    link_layer_detection: bool,
    started: bool,
    next_pkt: u64,
    outbox: Vec<Effect>,
}

impl AodvAgent {
    pub fn new(id: NodeId, config: AodvConfig, link_layer_detection: bool) -> AodvAgent {
        AodvAgent {
            id,
            seqno: 2,
            bid: 1,
            tables: AodvTables::new(),
            config,
            link_layer_detection,
            started: false,
            next_pkt: 0,
            outbox: Vec::new(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn seqno(&self) -> u32 {
        self.seqno
    }

    pub fn bid(&self) -> u32 {
        self.bid
    }

    pub fn config(&self) -> &AodvConfig {
        &self.config
    }

    pub fn route(&self, dst: NodeId) -> Option<&RouteEntry> {
        self.tables.rtable.get(dst)
    }

    pub fn neighbor(&self, id: NodeId) -> Option<Neighbor> {
        self.tables.neighbors.lookup(id)
    }

    pub fn tables(&self) -> &AodvTables {
        &self.tables
    }

    /// Direct table access, mainly for building test situations that the
    /// full simulation cannot reach organically.
    pub fn tables_mut(&mut self) -> &mut AodvTables {
        &mut self.tables
    }

    /// Drains the queued side effects.
    pub fn take_effects(&mut self) -> Vec<Effect> {
        core::mem::take(&mut self.outbox)
    }

    fn emit(&mut self, effect: Effect) {
        self.outbox.push(effect);
    }

    fn alloc_uid(&mut self) -> u64 {
        // High bit keeps agent-built packets clear of the simulation's
        // data packet ids.
        let uid = (1u64 << 63) | ((self.id.0 as u64) << 32) | self.next_pkt;
        self.next_pkt += 1;
        uid
    }

    /// Arms the broadcast-id, neighbor, and route-cache timers, plus the
    /// hello timer when beacons are enabled. All fire once immediately
    /// and rearm themselves from then on.
    pub fn start(&mut self) -> Result<(), AgentError> {
        if self.started {
            return Err(AgentError::AlreadyStarted);
        }
        self.started = true;
        self.emit(Effect::ArmTimer {
            kind: TimerKind::Broadcast,
            delay: 0.0,
        });
        self.emit(Effect::ArmTimer {
            kind: TimerKind::Neighbor,
            delay: 0.0,
        });
        self.emit(Effect::ArmTimer {
            kind: TimerKind::RouteCache,
            delay: 0.0,
        });
        if self.config.hello_enabled {
            self.emit(Effect::ArmTimer {
                kind: TimerKind::Hello,
                delay: 0.0,
            });
        }
        Ok(())
    }

    /// Network-layer entry point. Control packets lose one TTL and go to
    /// the dispatcher; data is resolved against the routing table. A data
    /// packet that returns to its own source is a routing loop.
    pub fn recv(&mut self, mut pkt: Packet, from: Option<NodeId>, now: Time, rng: &mut RandomSource) {
        if matches!(pkt.payload, Payload::Aodv(_)) {
            pkt.ttl = pkt.ttl.saturating_sub(1);
            let from = from.expect("control packets always arrive over the medium");
            self.recv_aodv(pkt, from, now, rng);
            return;
        }
        if pkt.src == self.id {
            if pkt.num_forwards == 0 {
                // fresh from the local traffic source
                pkt.ttl = self.config.network_diameter;
                self.rt_resolve(pkt, now, rng);
            } else {
                self.emit(Effect::Drop {
                    pkt,
                    reason: DropReason::RouteLoop,
                });
            }
            return;
        }
        pkt.ttl = pkt.ttl.saturating_sub(1);
        if pkt.ttl == 0 {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::TtlZero,
            });
            return;
        }
        self.rt_resolve(pkt, now, rng);
    }

    /// Dispatches a control packet by header tag.
    pub fn recv_aodv(&mut self, pkt: Packet, from: NodeId, now: Time, rng: &mut RandomSource) {
        match pkt.aodv_header() {
            Some(AodvHeader::Request { .. }) => self.recv_request(pkt, from, now),
            Some(AodvHeader::Reply { .. }) => self.recv_reply(pkt, from, now, rng),
            Some(AodvHeader::Error { .. }) => self.recv_error(pkt, from, now, rng),
            Some(AodvHeader::Hello { .. }) => self.recv_hello(pkt, from, now),
            Some(AodvHeader::Unknown { .. }) | None => self.emit(Effect::Drop {
                pkt,
                reason: DropReason::UnknownType,
            }),
        }
    }

    /// Route request handling: dedup, reverse-route install, then answer
    /// as destination, answer from the route cache, or flood on.
    pub fn recv_request(&mut self, mut pkt: Packet, from: NodeId, now: Time) {
        let (hop_count, bcast_id, rq_dst, rq_dst_seqno, rq_src, rq_src_seqno, timestamp) =
            match pkt.aodv_header() {
                Some(AodvHeader::Request {
                    hop_count,
                    bcast_id,
                    dst,
                    dst_seqno,
                    src,
                    src_seqno,
                    timestamp,
                }) => (
                    *hop_count, *bcast_id, *dst, *dst_seqno, *src, *src_seqno, *timestamp,
                ),
                _ => return,
            };
        if rq_src == self.id {
            return; // my own flood came back
        }
        if self.tables.bid_cache.lookup(rq_src, bcast_id, now) {
            return; // already handled this flood
        }
        self.tables
            .bid_cache
            .insert(rq_src, bcast_id, now, self.config.bcast_id_save);

        // Reverse route toward the originator, one hop through the sender.
        let retries = self.config.rreq_retries;
        let lifetime = self.config.active_route_timeout;
        let metric = hop_count.saturating_add(1).min(HOPS_INFINITY as u32 - 1) as u16;
        let entry = self.tables.rtable.add(rq_src, retries);
        if rq_src_seqno > entry.seqno || (rq_src_seqno == entry.seqno && metric < entry.hops) {
            let expire = entry.expire.max(now + lifetime);
            entry.update(rq_src_seqno, metric, Some(from), expire);
        }

        if rq_dst == self.id {
            // I am the destination: advance past any sequence number the
            // network has seen for me, so the reply beats stale cached
            // routes (and the requester's own pre-break metric during a
            // local repair).
            self.seqno = round_up_even(core::cmp::max(self.seqno, rq_dst_seqno) + 1);
            let (rpseq, lifetime) = (self.seqno, self.config.my_route_timeout);
            self.send_reply(rq_src, 1, self.id, rpseq, lifetime, timestamp, now);
            return;
        }
        // A fresh-enough cached route lets an intermediate answer.
        let cached = self.tables.rtable.get(rq_dst).and_then(|e| {
            if e.flag == RouteFlag::Up && e.seqno >= rq_dst_seqno {
                Some((e.hops as u32 + 1, e.seqno, (e.expire - now).max(0.0)))
            } else {
                None
            }
        });
        if let Some((hops, rpseq, remaining)) = cached {
            self.send_reply(rq_src, hops, rq_dst, rpseq, remaining, timestamp, now);
            return;
        }
        // Flood on. An exhausted hop budget ends the flood quietly.
        if pkt.ttl == 0 {
            return;
        }
        pkt.src = self.id;
        pkt.nexthop = None;
        if let Payload::Aodv(AodvHeader::Request { hop_count, .. }) = &mut pkt.payload {
            *hop_count += 1;
        }
        self.emit(Effect::Transmit {
            pkt,
            dest: TxDest::Broadcast,
            delay: 0.0,
        });
    }

    /// Route reply handling: install the forward route when it is fresher
    /// (or equally fresh and shorter), flush waiting packets, and relay
    /// the reply toward the requester when we are not it.
    pub fn recv_reply(&mut self, mut pkt: Packet, from: NodeId, now: Time, rng: &mut RandomSource) {
        let (hop_count, rpdst, rpseq, lifetime) = match pkt.aodv_header() {
            Some(AodvHeader::Reply {
                hop_count,
                rpdst,
                rpseq,
                lifetime,
                ..
            }) => (*hop_count, *rpdst, *rpseq, *lifetime),
            _ => return,
        };
        let retries = self.config.rreq_retries;
        let metric = hop_count.min(HOPS_INFINITY as u32 - 1) as u16;
        let entry = self.tables.rtable.add(rpdst, retries);
        let fresher = rpseq > entry.seqno || (rpseq == entry.seqno && metric < entry.hops);
        if fresher {
            entry.update(rpseq, metric, Some(from), now + lifetime);
            entry.rreq_retries_left = retries;
            let waiting = self.tables.rqueue.drain(rpdst);
            for buffered in waiting {
                self.rt_resolve(buffered, now, rng);
            }
        }
        if pkt.dst == Addr::Node(self.id) {
            return; // the reply reached the requester
        }
        if !fresher {
            return; // stale replies are not relayed
        }
        let ipdst = match pkt.dst.node() {
            Some(d) => d,
            None => return,
        };
        let reverse_up = self
            .tables
            .rtable
            .get(ipdst)
            .is_some_and(|e| e.flag == RouteFlag::Up);
        if reverse_up {
            if let Payload::Aodv(AodvHeader::Reply { hop_count, .. }) = &mut pkt.payload {
                *hop_count += 1;
            }
            self.forward(Some(ipdst), pkt, 0.0, now);
        } else {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::NoRoute,
            });
        }
    }

    /// Route error handling. Every listed destination routed through the
    /// sender with a sequence number no fresher than advertised goes down
    /// and is re-advertised upstream in one aggregated error.
    pub fn recv_error(&mut self, pkt: Packet, from: NodeId, now: Time, rng: &mut RandomSource) {
        let dests = match pkt.aodv_header() {
            Some(AodvHeader::Error { dests }) => dests.clone(),
            _ => return,
        };
        let delete_period = self.config.delete_period;
        let mut propagate = Vec::new();
        for (udst, useq) in dests {
            if let Some(entry) = self.tables.rtable.get_mut(udst) {
                if entry.flag != RouteFlag::Down
                    && entry.nexthop == Some(from)
                    && entry.seqno <= useq
                {
                    entry.down(now, delete_period);
                    entry.seqno = useq; // adopt the advertised seqno as-is
                    propagate.push((udst, useq));
                }
            }
        }
        if !propagate.is_empty() {
            self.send_error(propagate, true, now, rng);
        }
    }

    /// Hello reception: the sender becomes (or stays) a neighbor with a
    /// refreshed expiry. Hellos are consumed, never relayed.
    pub fn recv_hello(&mut self, pkt: Packet, from: NodeId, now: Time) {
        let _ = pkt;
        let (loss, interval, retries) = (
            self.config.allowed_hello_loss,
            self.config.hello_interval,
            self.config.rreq_retries,
        );
        self.tables.nb_insert(from, now, loss, interval, retries);
    }

    /// Broadcasts a one-hop hello beacon carrying our sequence number and
    /// the advertised neighbor lifetime.
    pub fn send_hello(&mut self, _now: Time) {
        let lifetime = (1 + self.config.allowed_hello_loss) as f64 * self.config.hello_interval;
        let header = AodvHeader::Hello {
            hop_count: 1,
            rpdst: self.id,
            rpseq: self.seqno,
            lifetime,
        };
        let uid = self.alloc_uid();
        let pkt = Packet::aodv(uid, self.id, Addr::Broadcast, 1, header);
        self.emit(Effect::Transmit {
            pkt,
            dest: TxDest::Broadcast,
            delay: 0.0,
        });
    }

    /// Originates a route request flood for `dst` and arms the retry
    /// timer with binary-exponential backoff. No-op while a route is UP,
    /// a request is already in flight, or the retry budget is spent.
    pub fn send_request(&mut self, dst: NodeId, now: Time) {
        let retries_cfg = self.config.rreq_retries;
        let entry = self.tables.rtable.add(dst, retries_cfg);
        if entry.flag == RouteFlag::Up || entry.req_pending || entry.rreq_retries_left == 0 {
            return;
        }
        let attempt = retries_cfg - entry.rreq_retries_left;
        entry.rreq_retries_left -= 1;
        entry.req_pending = true;
        let dst_seqno = entry.seqno;
        self.seqno += 2;
        let bid = self.bid;
        self.bid += 1;
        let header = AodvHeader::Request {
            hop_count: 0,
            bcast_id: bid,
            dst,
            dst_seqno,
            src: self.id,
            src_seqno: self.seqno,
            timestamp: now.secs(),
        };
        let ttl = self.config.network_diameter;
        let uid = self.alloc_uid();
        let pkt = Packet::aodv(uid, self.id, Addr::Broadcast, ttl, header);
        self.emit(Effect::Transmit {
            pkt,
            dest: TxDest::Broadcast,
            delay: 0.0,
        });
        let wait = self.config.rreq_retry_base * (1u64 << attempt) as f64;
        self.emit(Effect::ArmTimer {
            kind: TimerKind::LocalRepair(dst),
            delay: wait,
        });
    }

    /// Unicasts a route reply toward `ipdst` along the reverse route.
    /// The parameter list mirrors the protocol operation.
    #[allow(clippy::too_many_arguments)]
    pub fn send_reply(
        &mut self,
        ipdst: NodeId,
        hop_count: u32,
        rpdst: NodeId,
        rpseq: u32,
        lifetime: f64,
        timestamp: f64,
        _now: Time,
    ) {
        let header = AodvHeader::Reply {
            hop_count,
            rpdst,
            rpseq,
            lifetime,
            timestamp,
        };
        let ttl = self.config.network_diameter;
        let uid = self.alloc_uid();
        let mut pkt = Packet::aodv(uid, self.id, Addr::Node(ipdst), ttl, header);
        let nexthop = self
            .tables
            .rtable
            .get(ipdst)
            .filter(|e| e.flag == RouteFlag::Up)
            .and_then(|e| e.nexthop);
        match nexthop {
            Some(nh) => {
                pkt.nexthop = Some(nh);
                self.emit(Effect::Transmit {
                    pkt,
                    dest: TxDest::Unicast(nh),
                    delay: 0.0,
                });
            }
            None => self.emit(Effect::Drop {
                pkt,
                reason: DropReason::NoRoute,
            }),
        }
    }

    /// Broadcasts a route error (TTL 1) to the upstream neighborhood,
    /// optionally jittered into (now, now + 10 ms].
    pub fn send_error(
        &mut self,
        dests: Vec<(NodeId, u32)>,
        jitter: bool,
        _now: Time,
        rng: &mut RandomSource,
    ) {
        debug_assert!(!dests.is_empty(), "route errors list at least one destination");
        let header = AodvHeader::Error { dests };
        let uid = self.alloc_uid();
        let pkt = Packet::aodv(uid, self.id, Addr::Broadcast, 1, header);
        let delay = if jitter {
            0.01 * (1.0 - rng.uniform01())
        } else {
            0.0
        };
        self.emit(Effect::Transmit {
            pkt,
            dest: TxDest::Broadcast,
            delay,
        });
    }

    /// Hands a packet to the medium: unicast along the given route
    /// (refreshing its expiry) or broadcast when no route is given.
    pub fn forward(&mut self, route_to: Option<NodeId>, mut pkt: Packet, delay: f64, now: Time) {
        if pkt.ttl == 0 {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::TtlZero,
            });
            return;
        }
        if pkt.src != self.id {
            pkt.num_forwards += 1;
        }
        match route_to {
            Some(dst) => {
                let lifetime = self.config.active_route_timeout;
                let nexthop = match self.tables.rtable.get_mut(dst) {
                    Some(e) if e.flag == RouteFlag::Up => {
                        e.expire = now + lifetime;
                        e.nexthop
                    }
                    _ => None,
                };
                match nexthop {
                    Some(nh) => {
                        pkt.nexthop = Some(nh);
                        self.emit(Effect::Transmit {
                            pkt,
                            dest: TxDest::Unicast(nh),
                            delay,
                        });
                    }
                    None => self.emit(Effect::Drop {
                        pkt,
                        reason: DropReason::NoRoute,
                    }),
                }
            }
            None => {
                pkt.nexthop = None;
                self.emit(Effect::Transmit {
                    pkt,
                    dest: TxDest::Broadcast,
                    delay,
                });
            }
        }
    }

    /// Resolves a data packet: forward over an UP route, buffer during
    /// discovery or repair, or drop with an upstream error when relaying
    /// with no route at all.
    pub fn rt_resolve(&mut self, pkt: Packet, now: Time, rng: &mut RandomSource) {
        let dst = match pkt.dst.node() {
            Some(d) => d,
            None => return, // generated data is never broadcast
        };
        let retries = self.config.rreq_retries;
        let flag = self.tables.rtable.add(dst, retries).flag;
        match flag {
            RouteFlag::Up => self.forward(Some(dst), pkt, 0.0, now),
            RouteFlag::Repair => {
                if let Some(evicted) = self.tables.rqueue.enque(dst, pkt, now) {
                    self.emit(Effect::Drop {
                        pkt: evicted,
                        reason: DropReason::QueueFull,
                    });
                }
            }
            RouteFlag::Down if pkt.src == self.id => {
                if let Some(evicted) = self.tables.rqueue.enque(dst, pkt, now) {
                    self.emit(Effect::Drop {
                        pkt: evicted,
                        reason: DropReason::QueueFull,
                    });
                }
                self.send_request(dst, now);
            }
            RouteFlag::Down => {
                let listed = self
                    .tables
                    .rtable
                    .get(dst)
                    .map_or(1, |e| e.seqno.wrapping_add(1));
                self.emit(Effect::Drop {
                    pkt,
                    reason: DropReason::NoRoute,
                });
                self.send_error(alloc::vec![(dst, listed)], false, now, rng);
            }
        }
    }

    /// Link-layer failure callback for an undeliverable packet. Data on a
    /// break closer to the destination than the source is repaired
    /// locally; anything else drops and the broken neighbor is torn down.
    pub fn rt_ll_failed(&mut self, pkt: Packet, now: Time, rng: &mut RandomSource) {
        if !self.link_layer_detection {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::Callback,
            });
            return;
        }
        if !pkt.is_data() || pkt.dst.is_broadcast() {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::Callback,
            });
            return;
        }
        let dst = pkt.dst.node().expect("unicast data");
        let broken = pkt.nexthop;
        let repairable = self.tables.rtable.get(dst).is_some_and(|e| {
            e.hops != HOPS_INFINITY && (e.hops as u32) < pkt.num_forwards as u32
        });
        if repairable {
            self.local_rt_repair(dst, pkt, now);
        } else {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::Callback,
            });
            if let Some(broken) = broken {
                self.nb_delete(broken, now, rng);
            }
        }
    }

    /// Buffers the packet, marks the route as under repair, and starts a
    /// repair discovery. A repair already in progress only buffers.
    pub fn local_rt_repair(&mut self, dst: NodeId, pkt: Packet, now: Time) {
        if let Some(evicted) = self.tables.rqueue.enque(dst, pkt, now) {
            self.emit(Effect::Drop {
                pkt: evicted,
                reason: DropReason::QueueFull,
            });
        }
        let already_repairing = match self.tables.rtable.get_mut(dst) {
            Some(e) => {
                let repairing = e.flag == RouteFlag::Repair;
                e.mark_repair();
                repairing
            }
            None => return,
        };
        if already_repairing {
            return;
        }
        self.send_request(dst, now);
    }

    /// Removes `id` from the neighbor list and runs link-failure handling
    /// for every route through it.
    pub fn nb_delete(&mut self, id: NodeId, now: Time, rng: &mut RandomSource) {
        self.tables.neighbors.delete(id);
        self.handle_link_failure(id, now, rng);
    }

    /// Downs every route whose next hop is the lost node and, when any
    /// were downed, broadcasts one aggregated route error for them.
    pub fn handle_link_failure(&mut self, id: NodeId, now: Time, rng: &mut RandomSource) {
        let delete_period = self.config.delete_period;
        let mut dests = Vec::new();
        for entry in self.tables.rtable.iter_mut() {
            if entry.flag != RouteFlag::Down && entry.nexthop == Some(id) {
                entry.down(now, delete_period);
                dests.push((entry.dst, entry.seqno));
            }
        }
        if !dests.is_empty() {
            self.send_error(dests, false, now, rng);
        }
        // with DestCount 0 no error packet is built at all
    }

    /// Route-cache sweep. Expired UP routes shed their send buffer with a
    /// no-route drop per packet and go down; live UP routes flush waiting
    /// packets; DOWN routes with waiting packets restart discovery.
    pub fn rt_purge(&mut self, now: Time) {
        for pkt in self.tables.rqueue.drop_stale(now) {
            self.emit(Effect::Drop {
                pkt,
                reason: DropReason::QueueTimeout,
            });
        }
        let delete_period = self.config.delete_period;
        for dst in self.tables.rtable.destinations() {
            let (flag, expired, pending) = match self.tables.rtable.get(dst) {
                Some(e) => (e.flag, e.expire <= now, e.req_pending),
                None => continue,
            };
            match flag {
                RouteFlag::Up if expired => {
                    for pkt in self.tables.rqueue.drain(dst) {
                        self.emit(Effect::Drop {
                            pkt,
                            reason: DropReason::NoRoute,
                        });
                    }
                    if let Some(e) = self.tables.rtable.get_mut(dst) {
                        e.down(now, delete_period);
                    }
                }
                RouteFlag::Up => {
                    while let Some(pkt) = self.tables.rqueue.deque(dst) {
                        self.forward(Some(dst), pkt, 0.0, now);
                    }
                }
                RouteFlag::Down => {
                    if self.tables.rqueue.has_packets(dst) {
                        self.send_request(dst, now);
                    } else if expired && !pending {
                        // long-dead entry, nothing waiting on it
                        self.tables.rtable.remove(dst);
                    }
                }
                RouteFlag::Repair => {} // the repair timer owns these
            }
        }
    }

    /// Timer dispatch: purge cadences, hello beaconing with its random
    /// interval, and the per-destination request/repair deadline.
    pub fn handle_timer(&mut self, kind: TimerKind, now: Time, rng: &mut RandomSource) {
        match kind {
            TimerKind::Broadcast => {
                self.tables.bid_cache.purge(now);
                let delay = self.config.bcast_id_save;
                self.emit(Effect::ArmTimer { kind, delay });
            }
            TimerKind::Hello => {
                self.send_hello(now);
                let delay = self.config.min_hello_interval
                    + (self.config.max_hello_interval - self.config.min_hello_interval)
                        * rng.uniform01();
                self.emit(Effect::ArmTimer { kind, delay });
            }
            TimerKind::Neighbor => {
                let dead = self.tables.neighbors.purge(now);
                for id in dead {
                    self.handle_link_failure(id, now, rng);
                }
                let delay = 1.5 * self.config.hello_interval;
                self.emit(Effect::ArmTimer { kind, delay });
            }
            TimerKind::RouteCache => {
                self.rt_purge(now);
                let delay = self.config.frequency;
                self.emit(Effect::ArmTimer { kind, delay });
            }
            TimerKind::LocalRepair(dst) => self.request_deadline(dst, now, rng),
        }
    }

    /// Fires when a request round for `dst` times out: retry with doubled
    /// backoff while budget remains, otherwise give up. A failed repair
    /// additionally downs the route and reports it upstream.
    fn request_deadline(&mut self, dst: NodeId, now: Time, rng: &mut RandomSource) {
        let retries_cfg = self.config.rreq_retries;
        let delete_period = self.config.delete_period;
        let (flag, retries_left) = match self.tables.rtable.get_mut(dst) {
            Some(e) => {
                e.req_pending = false;
                (e.flag, e.rreq_retries_left)
            }
            None => return,
        };
        match flag {
            RouteFlag::Up => {
                if let Some(e) = self.tables.rtable.get_mut(dst) {
                    e.rreq_retries_left = retries_cfg;
                }
            }
            _ if retries_left > 0 => self.send_request(dst, now),
            _ => {
                if flag == RouteFlag::Repair {
                    let listed = {
                        let e = self.tables.rtable.get_mut(dst).expect("entry exists");
                        e.down(now, delete_period);
                        e.seqno
                    };
                    self.send_error(alloc::vec![(dst, listed)], true, now, rng);
                }
                for pkt in self.tables.rqueue.drain(dst) {
                    self.emit(Effect::Drop {
                        pkt,
                        reason: DropReason::NoRoute,
                    });
                }
                if let Some(e) = self.tables.rtable.get_mut(dst) {
                    e.rreq_retries_left = retries_cfg;
                }
            }
        }
    }
}
