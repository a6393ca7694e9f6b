//! The four data structures the AODV agent's management functions operate
//! on: routing table, neighbor list, broadcast-ID cache, and the
//! per-destination send buffer.
//!
//! All timer-driven purges treat the expiry boundary as inclusive: an
//! entry with `expire <= now` is removed.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use crate::packet::{NodeId, Packet};
use crate::time::Time;

/// Metric sentinel for destinations with no usable path.
pub const HOPS_INFINITY: u16 = u16::MAX;

/// Buffered packets allowed per destination before the oldest is evicted.
pub const REQUEST_QUEUE_CAPACITY: usize = 64;
/// Seconds a buffered packet may wait before it times out.
pub const REQUEST_QUEUE_TIMEOUT: f64 = 30.0;

/// Route liveness state.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RouteFlag {
    Up,
    Down,
    Repair,
}

/// Per-destination routing state.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteEntry {
    pub dst: NodeId,
    pub seqno: u32,
    pub hops: u16,
    pub nexthop: Option<NodeId>,
    pub expire: Time,
    pub flag: RouteFlag,
    pub rreq_retries_left: u32,
    /// True while a route-request retry timer for this destination is armed.
    pub req_pending: bool,
}

impl RouteEntry {
    fn fresh(dst: NodeId, retries: u32) -> RouteEntry {
        RouteEntry {
            dst,
            seqno: 0,
            hops: HOPS_INFINITY,
            nexthop: None,
            expire: Time::ZERO,
            flag: RouteFlag::Down,
            rreq_retries_left: retries,
            req_pending: false,
        }
    }

    /// Overwrites the routing fields and marks the route usable. Callers
    /// apply this only under their freshness rules.
    pub fn update(&mut self, seqno: u32, hops: u16, nexthop: Option<NodeId>, expire: Time) {
        self.seqno = seqno;
        self.hops = hops;
        self.nexthop = nexthop;
        self.expire = expire;
        self.flag = RouteFlag::Up;
    }

    /// Invalidates the route. A route is never downed twice: repeat calls
    /// are no-ops. The sequence number gains one, marking it odd while the
    /// entry lingers for `delete_period` seconds.
    pub fn down(&mut self, now: Time, delete_period: f64) {
        if self.flag == RouteFlag::Down {
            return;
        }
        self.seqno = self.seqno.wrapping_add(1);
        self.flag = RouteFlag::Down;
        self.nexthop = None;
        self.hops = HOPS_INFINITY;
        self.expire = now + delete_period;
    }

    /// Marks an UP route as under local repair; any other state is left
    /// alone so a repair in progress is never restarted from the side.
    pub fn mark_repair(&mut self) {
        if self.flag == RouteFlag::Up {
            self.flag = RouteFlag::Repair;
        }
    }
}

/// Map from destination to its single route entry.
#[derive(Clone, Debug, Default)]
pub struct RoutingTable {
    entries: BTreeMap<NodeId, RouteEntry>,
}

impl RoutingTable {
    pub fn new() -> RoutingTable {
        RoutingTable::default()
    }

    /// Lookup-or-create. Fresh entries start DOWN with sequence number 0
    /// and an infinite metric.
    pub fn add(&mut self, dst: NodeId, retries: u32) -> &mut RouteEntry {
        self.entries
            .entry(dst)
            .or_insert_with(|| RouteEntry::fresh(dst, retries))
    }

    pub fn get(&self, dst: NodeId) -> Option<&RouteEntry> {
        self.entries.get(&dst)
    }

    pub fn get_mut(&mut self, dst: NodeId) -> Option<&mut RouteEntry> {
        self.entries.get_mut(&dst)
    }

    pub fn remove(&mut self, dst: NodeId) {
        self.entries.remove(&dst);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RouteEntry> {
        self.entries.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut RouteEntry> {
        self.entries.values_mut()
    }

    pub fn destinations(&self) -> Vec<NodeId> {
        self.entries.keys().copied().collect()
    }
}

/// A hello-maintained neighbor.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Neighbor {
    pub id: NodeId,
    pub expire: Time,
}

/// Neighbors heard from recently, keyed by id.
#[derive(Clone, Debug, Default)]
pub struct NeighborList {
    entries: BTreeMap<NodeId, Time>,
}

impl NeighborList {
    pub fn new() -> NeighborList {
        NeighborList::default()
    }

    /// Inserts or refreshes; the expiry is recomputed either way.
    pub fn insert(&mut self, id: NodeId, expire: Time) {
        self.entries.insert(id, expire);
    }

    pub fn lookup(&self, id: NodeId) -> Option<Neighbor> {
        self.entries.get(&id).map(|&expire| Neighbor { id, expire })
    }

    /// Removes the neighbor; absent ids are a no-op.
    pub fn delete(&mut self, id: NodeId) -> bool {
        self.entries.remove(&id).is_some()
    }

    /// Removes every neighbor with `expire <= now`, returning the removed
    /// ids so the owning agent can run its link-failure handling.
    pub fn purge(&mut self, now: Time) -> Vec<NodeId> {
        let dead: Vec<NodeId> = self
            .entries
            .iter()
            .filter(|(_, &expire)| expire <= now)
            .map(|(&id, _)| id)
            .collect();
        for id in &dead {
            self.entries.remove(id);
        }
        dead
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// RREQ dedup cache keyed by (originator, broadcast id).
#[derive(Clone, Debug, Default)]
pub struct BroadcastIdCache {
    entries: BTreeMap<(NodeId, u32), Time>,
}

impl BroadcastIdCache {
    pub fn new() -> BroadcastIdCache {
        BroadcastIdCache::default()
    }

    pub fn insert(&mut self, src: NodeId, bid: u32, now: Time, save: f64) {
        self.entries.insert((src, bid), now + save);
    }

    /// True iff an entry exists that has not yet expired at `now`.
    pub fn lookup(&self, src: NodeId, bid: u32, now: Time) -> bool {
        match self.entries.get(&(src, bid)) {
            Some(&expire) => now < expire,
            None => false,
        }
    }

    pub fn purge(&mut self, now: Time) -> usize {
        let before = self.entries.len();
        self.entries.retain(|_, &mut expire| expire > now);
        before - self.entries.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct Buffered {
    pkt: Packet,
    expire: Time,
}

/// Per-destination FIFO send buffer with a capacity limit and a
/// per-packet timeout.
#[derive(Default)]
pub struct RequestQueue {
    queues: BTreeMap<NodeId, VecDeque<Buffered>>,
}

impl RequestQueue {
    pub fn new() -> RequestQueue {
        RequestQueue::default()
    }

    /// Appends a packet for `dst`. When the queue is at capacity the
    /// oldest packet is returned so the caller can trace the drop.
    pub fn enque(&mut self, dst: NodeId, pkt: Packet, now: Time) -> Option<Packet> {
        let q = self.queues.entry(dst).or_default();
        let evicted = if q.len() >= REQUEST_QUEUE_CAPACITY {
            q.pop_front().map(|b| b.pkt)
        } else {
            None
        };
        q.push_back(Buffered {
            pkt,
            expire: now + REQUEST_QUEUE_TIMEOUT,
        });
        evicted
    }

    /// Removes and returns the head of the `dst` queue.
    pub fn deque(&mut self, dst: NodeId) -> Option<Packet> {
        let q = self.queues.get_mut(&dst)?;
        let head = q.pop_front().map(|b| b.pkt);
        if q.is_empty() {
            self.queues.remove(&dst);
        }
        head
    }

    /// Drains the whole queue for `dst` in FIFO order.
    pub fn drain(&mut self, dst: NodeId) -> Vec<Packet> {
        match self.queues.remove(&dst) {
            Some(q) => q.into_iter().map(|b| b.pkt).collect(),
            None => Vec::new(),
        }
    }

    /// Removes every packet whose timeout has passed, for the caller to
    /// trace as timed-out drops.
    pub fn drop_stale(&mut self, now: Time) -> Vec<Packet> {
        let mut stale = Vec::new();
        for q in self.queues.values_mut() {
            let mut kept = VecDeque::new();
            for b in q.drain(..) {
                if b.expire <= now {
                    stale.push(b.pkt);
                } else {
                    kept.push_back(b);
                }
            }
            *q = kept;
        }
        self.queues.retain(|_, q| !q.is_empty());
        stale
    }

    pub fn len(&self, dst: NodeId) -> usize {
        self.queues.get(&dst).map_or(0, |q| q.len())
    }

    pub fn has_packets(&self, dst: NodeId) -> bool {
        self.len(dst) > 0
    }
}

/// All four structures under single-agent ownership. The couplings the
/// protocol needs (a hello-learned neighbor doubles as a one-hop route)
/// live here rather than in the individual structures.
#[derive(Default)]
pub struct AodvTables {
    pub rtable: RoutingTable,
    pub neighbors: NeighborList,
    pub bid_cache: BroadcastIdCache,
    pub rqueue: RequestQueue,
}

impl AodvTables {
    pub fn new() -> AodvTables {
        AodvTables::default()
    }

    /// Inserts or refreshes a neighbor heard at `now`, with expiry
    /// `now + 1.5 * allowed_hello_loss * hello_interval`, and installs or
    /// refreshes the matching one-hop UP route.
    pub fn nb_insert(
        &mut self,
        id: NodeId,
        now: Time,
        allowed_hello_loss: u32,
        hello_interval: f64,
        rreq_retries: u32,
    ) {
        let expire = now + 1.5 * allowed_hello_loss as f64 * hello_interval;
        self.neighbors.insert(id, expire);
        let entry = self.rtable.add(id, rreq_retries);
        let route_expire = if entry.expire > expire { entry.expire } else { expire };
        let seqno = entry.seqno;
        entry.update(seqno, 1, Some(id), route_expire);
    }
}
