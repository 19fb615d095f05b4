use thiserror::Error;

use crate::engine::{NodeId, PacketId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("event {kind} scheduled at t={time} but clock is already at t={now}")]
    PastEvent { now: f64, time: f64, kind: &'static str },
    #[error("packet {packet} reached a second terminal state ({second}) after {first}")]
    DoubleTermination {
        packet: PacketId,
        first: &'static str,
        second: &'static str,
    },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown packet {0}")]
    UnknownPacket(PacketId),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Scheduling(#[from] SchedError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("grid deployment needs a perfect-square node count, got {0}")]
    NotSquare(usize),
    #[error("deployment needs at least one node")]
    Empty,
    #[error("battery capacity must be positive, got {0}")]
    NonPositiveCapacity(f64),
    #[error("node {id} at ({x}, {y}) lies outside the {area} m square")]
    OutOfArea { id: NodeId, x: f64, y: f64, area: f64 },
    #[error("sink {0} is not a deployed node")]
    BadSink(NodeId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedError {
    #[error("delay sample must be nonnegative, got {0}")]
    NegativeSample(f64),
    #[error("one-hop distance must be positive, got {0}")]
    NonPositiveOhd(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("run failed at policy={policy} routing={routing} alpha={alpha} deadline={deadline} seed={seed}: {source}")]
    Run {
        policy: String,
        routing: String,
        alpha: f64,
        deadline: f64,
        seed: u64,
        #[source]
        source: SimError,
    },
    #[error("setup failed: {0}")]
    Setup(#[from] SimError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
