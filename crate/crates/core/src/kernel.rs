//! Deterministic discrete-event scheduler.
//!
//! Single-threaded, virtual-clock event queue. Events at the same fire
//! time are delivered in insertion order (FIFO), so a run is a pure
//! function of the initial schedule and whatever its handlers do.

use alloc::collections::{BTreeSet, BinaryHeap};
use core::cmp::Ordering;

use crate::time::Time;

/// Errors from scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleError {
    /// Negative delays would fire events in the past.
    NegativeDelay,
    /// The queue has been driven to its end time and closed.
    Terminated,
}

impl core::fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScheduleError::NegativeDelay => write!(f, "negative delay"),
            ScheduleError::Terminated => write!(f, "scheduler already terminated"),
        }
    }
}

/// Handle returned by `schedule`, usable to cancel the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventHandle(u64);

struct Scheduled<E> {
    fire_at: Time,
    seq: u64,
    event: E,
}

// BinaryHeap is a max-heap; reverse so the earliest (time, seq) pops first.
impl<E> Ord for Scheduled<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .fire_at
            .cmp(&self.fire_at)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}
impl<E> Eq for Scheduled<E> {}

/// The event queue and virtual clock.
pub struct EventQueue<E> {
    now: Time,
    heap: BinaryHeap<Scheduled<E>>,
    pending: BTreeSet<u64>,
    next_seq: u64,
    terminated: bool,
}

impl<E> EventQueue<E> {
    pub fn new() -> EventQueue<E> {
        EventQueue {
            now: Time::ZERO,
            heap: BinaryHeap::new(),
            pending: BTreeSet::new(),
            next_seq: 0,
            terminated: false,
        }
    }

    pub fn now(&self) -> Time {
        self.now
    }

    /// Queues `event` at `now + delay`.
    pub fn schedule(&mut self, delay: f64, event: E) -> Result<EventHandle, ScheduleError> {
        if self.terminated {
            return Err(ScheduleError::Terminated);
        }
        if delay.is_nan() || delay < 0.0 {
            return Err(ScheduleError::NegativeDelay);
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.insert(seq);
        self.heap.push(Scheduled {
            fire_at: self.now + delay,
            seq,
            event,
        });
        Ok(EventHandle(seq))
    }

    /// Cancels a scheduled event. Returns true if it was still pending;
    /// cancelling twice (or after the event fired) is a no-op.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.pending.remove(&handle.0)
    }

    /// Pops the next event with `fire_at <= t_end`, advancing the clock to
    /// its fire time. Returns `None` when no such event remains.
    pub fn pop_next(&mut self, t_end: Time) -> Option<(Time, E)> {
        loop {
            let fire_at = self.heap.peek()?.fire_at;
            if fire_at > t_end {
                return None;
            }
            let item = self.heap.pop().expect("peeked");
            if self.pending.remove(&item.seq) {
                debug_assert!(item.fire_at >= self.now);
                self.now = item.fire_at;
                return Some((item.fire_at, item.event));
            }
            // cancelled entry, skip
        }
    }

    /// Processes every event due by `t_end` through `handler`, then leaves
    /// the clock exactly at `t_end`. Returns the number of events fired.
    pub fn run_until<F>(&mut self, t_end: Time, mut handler: F) -> usize
    where
        F: FnMut(Time, E, &mut EventQueue<E>),
    {
        assert!(t_end >= self.now, "cannot run the clock backwards");
        let mut fired = 0;
        while let Some((at, event)) = self.pop_next(t_end) {
            handler(at, event, self);
            fired += 1;
        }
        self.now = t_end;
        fired
    }

    /// Moves the clock forward to `t` without firing anything.
    pub fn advance_to(&mut self, t: Time) {
        assert!(t >= self.now, "cannot run the clock backwards");
        self.now = t;
    }

    /// Closes the queue; further scheduling is rejected.
    pub fn terminate(&mut self) {
        self.terminated = true;
    }
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        EventQueue::new()
    }
}
