//! Abstract shared-medium contention model.
//!
//! Slotted binary-exponential backoff over a channel where any two
//! transmissions overlapping in time fail if either sender is within
//! interference range of the other's receiver. Carrier sense defers a sender
//! while it hears a transmission that started at least one slot ago, so
//! senders whose backoff expires within the same slot collide.

use rand::Rng;

use crate::engine::{NodeId, PacketId};
use crate::topology::Position;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacConfig {
    /// Backoff slot, seconds.
    pub slot: f64,
    /// Initial contention window, slots.
    pub w0: u32,
    pub max_retries: u32,
    pub interference_range: f64,
    /// Per-frame channel time beyond the payload (preamble, headers,
    /// acknowledgement turnaround), seconds.
    pub frame_overhead: f64,
    /// Number of VMS priority classes; class 0 is the lowest.
    pub priority_classes: u32,
    pub bandwidth_bps: f64,
    pub packet_bits: f64,
}

impl Default for MacConfig {
    fn default() -> Self {
        MacConfig {
            slot: 20e-6,
            w0: 32,
            max_retries: 5,
            interference_range: 250.0,
            frame_overhead: 0.0,
            priority_classes: 4,
            bandwidth_bps: 2_000_000.0,
            packet_bits: 32.0 * 8.0,
        }
    }
}

/// Seconds needed to clock `bits` onto a link of `bandwidth_bps`.
pub fn payload_time(bits: f64, bandwidth_bps: f64) -> f64 {
    bits / bandwidth_bps
}

impl MacConfig {
    pub fn payload_time(&self) -> f64 {
        payload_time(self.packet_bits, self.bandwidth_bps)
    }

    /// Channel occupancy of one data frame.
    pub fn frame_time(&self) -> f64 {
        self.frame_overhead + self.payload_time()
    }

    /// Initial window for a priority class. `None` is the single class used by
    /// everything except VMS. Higher classes get proportionally smaller
    /// windows.
    pub fn base_window(&self, class: Option<u32>) -> u32 {
        match class {
            None => self.w0,
            Some(c) => {
                let k = self.priority_classes.max(1);
                let c = c.min(k - 1);
                (self.w0 * (k - c) / k).max(2)
            }
        }
    }

    /// Window after `retries` failed attempts.
    pub fn window(&self, retries: u32, class: Option<u32>) -> u32 {
        self.base_window(class).saturating_mul(1 << retries.min(16))
    }

    /// Expected backoff on an idle channel with the base window.
    pub fn mean_idle_backoff(&self) -> f64 {
        (self.w0 as f64 - 1.0) / 2.0 * self.slot
    }
}

/// Uniform draw in `[0, window)` slots.
pub fn draw_backoff<R: Rng + ?Sized>(window: u32, rng: &mut R) -> u32 {
    rng.gen_range(0..window.max(1))
}

/// Elapsed time from handing a packet to the MAC until its acknowledgement.
pub fn measure_hop_delay(send_ready: f64, ack_time: f64) -> f64 {
    debug_assert!(ack_time >= send_ready);
    ack_time - send_ready
}

/// One packet's passage through the MAC at a sender.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxAttempt {
    pub sender: NodeId,
    pub receiver: NodeId,
    pub packet: PacketId,
    /// VMS class; `None` for single-class policies.
    pub priority_class: Option<u32>,
    pub retries: u32,
    /// When the packet was handed to the MAC.
    pub send_ready: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacDropReason {
    MacFailure,
    LinkBroken,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TxOutcome {
    Delivered { delay: f64 },
    Collided,
    Dropped(MacDropReason),
}

impl TxAttempt {
    pub fn new(sender: NodeId, receiver: NodeId, packet: PacketId, priority_class: Option<u32>, now: f64) -> Self {
        TxAttempt {
            sender,
            receiver,
            packet,
            priority_class,
            retries: 0,
            send_ready: now,
        }
    }

    pub fn window(&self, cfg: &MacConfig) -> u32 {
        cfg.window(self.retries, self.priority_class)
    }

    /// Register a collision. Returns `Dropped(MacFailure)` once the retry
    /// budget is spent, `Collided` otherwise (with the window doubled).
    pub fn on_collision(&mut self, cfg: &MacConfig) -> TxOutcome {
        if self.retries >= cfg.max_retries {
            TxOutcome::Dropped(MacDropReason::MacFailure)
        } else {
            self.retries += 1;
            TxOutcome::Collided
        }
    }
}

#[derive(Debug, Clone)]
struct ActiveTx {
    id: u64,
    sender: NodeId,
    receiver: NodeId,
    start: f64,
    end: f64,
    failed: bool,
}

/// Shared medium: the set of transmissions currently on the air.
#[derive(Debug, Clone)]
pub struct Channel {
    in_range: Vec<Vec<bool>>,
    active: Vec<ActiveTx>,
    sense_delay: f64,
    next_id: u64,
}

impl Channel {
    pub fn new(positions: &[Position], interference_range: f64, sense_delay: f64) -> Self {
        let in_range = positions
            .iter()
            .map(|a| positions.iter().map(|b| a.distance(b) <= interference_range).collect())
            .collect();
        Channel {
            in_range,
            active: Vec::new(),
            sense_delay,
            next_id: 0,
        }
    }

    /// Does `a` interfere at `b`? A node always hears itself.
    pub fn interferes(&self, a: NodeId, b: NodeId) -> bool {
        self.in_range[a][b]
    }

    /// If `node` currently senses the medium busy, the time at which the
    /// sensed activity ends.
    pub fn sensed_busy_until(&self, node: NodeId, now: f64) -> Option<f64> {
        self.active
            .iter()
            .filter(|t| t.end > now && self.in_range[t.sender][node] && t.start + self.sense_delay <= now)
            .map(|t| t.end)
            .reduce(f64::max)
    }

    /// Put a frame on the air. Every overlapping transmission whose sender
    /// reaches the other's receiver fails, in both directions. A receiver
    /// that is itself transmitting cannot receive.
    pub fn begin(&mut self, sender: NodeId, receiver: NodeId, now: f64, duration: f64) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        let mut failed = false;
        for t in self.active.iter_mut().filter(|t| t.end > now) {
            if self.in_range[t.sender][receiver] || t.receiver == sender {
                failed = true;
            }
            if self.in_range[sender][t.receiver] || t.sender == receiver {
                t.failed = true;
            }
        }
        self.active.push(ActiveTx {
            id,
            sender,
            receiver,
            start: now,
            end: now + duration,
            failed,
        });
        id
    }

    /// Whether transmission `id` got through; removes it from the air.
    pub fn finish(&mut self, id: u64) -> bool {
        match self.active.iter().position(|t| t.id == id) {
            Some(i) => !self.active.swap_remove(i).failed,
            None => false,
        }
    }

    pub fn on_air(&self) -> usize {
        self.active.len()
    }
}
