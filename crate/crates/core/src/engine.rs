//! Deterministic discrete-event core.
//!
//! Events are ordered by `(time, seq)`. `seq` is a counter assigned at
//! insertion, so two events at the same instant are dispatched in the order
//! they were scheduled, independent of heap internals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;

pub type NodeId = usize;
pub type PacketId = u64;

/// Default end of a run, in simulated seconds.
pub const DEFAULT_SIM_END: f64 = 120.0;

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Publish {
        node: NodeId,
    },
    QueueRelease {
        node: NodeId,
    },
    /// Backoff expired; the node attempts to seize the channel.
    TxStart {
        node: NodeId,
    },
    TxEnd {
        node: NodeId,
        tx: u64,
    },
    /// A route repair completed; the held packet resumes at `node`.
    RepairTimer {
        node: NodeId,
        packet: PacketId,
    },
    EnergyCheck,
    TrafficToggle {
        on: bool,
    },
    NodeFail {
        node: NodeId,
    },
    SimEnd,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Publish { .. } => "Publish",
            EventKind::QueueRelease { .. } => "QueueRelease",
            EventKind::TxStart { .. } => "TxStart",
            EventKind::TxEnd { .. } => "TxEnd",
            EventKind::RepairTimer { .. } => "RepairTimer",
            EventKind::EnergyCheck => "EnergyCheck",
            EventKind::TrafficToggle { .. } => "TrafficToggle",
            EventKind::NodeFail { .. } => "NodeFail",
            EventKind::SimEnd => "SimEnd",
        }
    }

    pub fn node(&self) -> Option<NodeId> {
        match *self {
            EventKind::Publish { node }
            | EventKind::QueueRelease { node }
            | EventKind::TxStart { node }
            | EventKind::TxEnd { node, .. }
            | EventKind::RepairTimer { node, .. }
            | EventKind::NodeFail { node } => Some(node),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Event {
    pub time: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl Ord for Event {
    // Reversed so that `BinaryHeap` pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimClock {
    now: f64,
    end: f64,
}

impl SimClock {
    pub fn new(end: f64) -> Self {
        SimClock { now: 0.0, end }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn end(&self) -> f64 {
        self.end
    }
}

impl Default for SimClock {
    fn default() -> Self {
        SimClock::new(DEFAULT_SIM_END)
    }
}

/// Event queue plus the virtual clock it drives.
#[derive(Debug, Default)]
pub struct Scheduler {
    clock: SimClock,
    queue: BinaryHeap<Event>,
    next_seq: u64,
}

impl Scheduler {
    pub fn new(end: f64) -> Self {
        Scheduler {
            clock: SimClock::new(end),
            queue: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    pub fn now(&self) -> f64 {
        self.clock.now
    }

    pub fn end(&self) -> f64 {
        self.clock.end
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    /// Enqueue `kind` at absolute time `time`. Returns the assigned sequence
    /// number.
    pub fn schedule(&mut self, time: f64, kind: EventKind) -> Result<u64, SimError> {
        if !(time >= self.clock.now) {
            return Err(SimError::PastEvent {
                now: self.clock.now,
                time,
                kind: kind.name(),
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Event { time, seq, kind });
        Ok(seq)
    }

    pub fn schedule_in(&mut self, delay: f64, kind: EventKind) -> Result<u64, SimError> {
        self.schedule(self.clock.now + delay, kind)
    }

    /// Pop the next event if it is due at or before `until`, advancing the
    /// clock to its timestamp.
    pub fn pop_until(&mut self, until: f64) -> Option<Event> {
        match self.queue.peek() {
            Some(ev) if ev.time <= until => {
                let ev = self.queue.pop().expect("peeked");
                debug_assert!(ev.time >= self.clock.now);
                self.clock.now = ev.time;
                Some(ev)
            }
            _ => None,
        }
    }
}

/// Something that reacts to dispatched events.
pub trait Handler {
    fn handle(&mut self, event: &Event, sched: &mut Scheduler) -> Result<(), SimError>;
}

/// Dispatch every event with `time <= until` in `(time, seq)` order.
/// Returns the number of dispatched events.
pub fn run<H: Handler>(sched: &mut Scheduler, handler: &mut H, until: f64) -> Result<u64, SimError> {
    let mut dispatched = 0;
    while let Some(ev) = sched.pop_until(until) {
        handler.handle(&ev, sched)?;
        dispatched += 1;
    }
    Ok(dispatched)
}

pub type SimRng = ChaCha8Rng;

/// Independent generator for `stream` under `seed`. ChaCha8 with the stream
/// id as its nonce, so streams never overlap and adding a stream does not
/// perturb the others.
pub fn rng_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream ids reserved for non-node consumers; node `i` uses stream `i`.
pub const STREAM_DEPLOYMENT: u64 = u64::MAX;

/// One line of the optional event trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLine {
    pub time: f64,
    pub kind: &'static str,
    pub node: Option<NodeId>,
    pub packet: Option<PacketId>,
    pub detail: String,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let node = self.node.map_or_else(|| "-".to_string(), |n| n.to_string());
        let packet = self.packet.map_or_else(|| "-".to_string(), |p| p.to_string());
        write!(
            f,
            "{:.9}\t{}\t{}\t{}\t{}",
            self.time, self.kind, node, packet, self.detail
        )
    }
}
