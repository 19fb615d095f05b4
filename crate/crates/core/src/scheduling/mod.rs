//! Packet scheduling: delay estimation, slack allocation, and the transmit
//! queue.

mod etd;
mod policy;
mod queue;

pub use etd::{EtdEstimator, DEFAULT_SMOOTHING};
pub use policy::{
    compute_eetd, target_delay_dynamic, target_delay_nonlinear, target_delay_static, HopContext, Metric, Policy,
    Variant, DEFAULT_ALPHA, DEFAULT_DVM_EPSILON, MAX_EXPONENT,
};
pub use queue::{ReleaseQueue, DEFAULT_QUEUE_CAPACITY};

use crate::engine::{NodeId, PacketId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopRecord {
    pub node: NodeId,
    pub arrive: f64,
    pub release: f64,
    /// When the next hop acknowledged it; `None` while pending.
    pub delivered: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub id: PacketId,
    pub source: NodeId,
    pub sink: NodeId,
    pub created_at: f64,
    /// Relative end-to-end deadline, seconds.
    pub deadline: f64,
    /// Source-to-sink distance in the scheduler's metric, fixed at creation.
    pub source_distance: f64,
    /// Target delay the source assigned (informational for SRTS).
    pub target_delay_at_source: f64,
    pub hops_traversed: u32,
    pub per_hop_log: Vec<HopRecord>,
}

impl Packet {
    pub fn elapsed(&self, now: f64) -> f64 {
        (now - self.created_at).max(0.0)
    }

    /// Nodes visited so far, starting at the source.
    pub fn path(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.per_hop_log.iter().map(|h| h.node)
    }

    pub fn meets_deadline(&self, delivered_at: f64) -> bool {
        self.elapsed(delivered_at) <= self.deadline
    }
}
