//! Node deployment, the radio-range neighbor graph, and the battery model.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::NodeId;
use crate::error::TopologyError;

pub const DEFAULT_AREA_M: f64 = 1000.0;
pub const DEFAULT_RADIO_RANGE_M: f64 = 250.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Battery classification, ordered from healthiest to weakest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PowerZone {
    Active,
    Critical,
    Danger,
}

impl fmt::Display for PowerZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerZone::Active => "Active",
            PowerZone::Critical => "Critical",
            PowerZone::Danger => "Danger",
        })
    }
}

/// Fractions of capacity separating the zones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneThresholds {
    pub active: f64,
    pub danger: f64,
}

impl Default for ZoneThresholds {
    fn default() -> Self {
        ZoneThresholds {
            active: 0.3,
            danger: 0.1,
        }
    }
}

/// Classify a battery level: Active above `active`, Critical in
/// `(danger, active]`, Danger at or below `danger`.
pub fn power_zone(remaining: f64, capacity: f64, thresholds: ZoneThresholds) -> Result<PowerZone, TopologyError> {
    if !(capacity > 0.0) {
        return Err(TopologyError::NonPositiveCapacity(capacity));
    }
    let ratio = remaining / capacity;
    Ok(if ratio > thresholds.active {
        PowerZone::Active
    } else if ratio > thresholds.danger {
        PowerZone::Critical
    } else {
        PowerZone::Danger
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConfig {
    pub capacity: f64,
    pub tx_cost: f64,
    pub rx_cost: f64,
    pub thresholds: ZoneThresholds,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            capacity: 1e6,
            tx_cost: 1.0,
            rx_cost: 0.5,
            thresholds: ZoneThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyState {
    pub remaining: f64,
    pub capacity: f64,
    pub zone: PowerZone,
}

impl EnergyState {
    pub fn new(remaining: f64, capacity: f64, thresholds: ZoneThresholds) -> Result<Self, TopologyError> {
        let remaining = remaining.clamp(0.0, capacity.max(0.0));
        Ok(EnergyState {
            remaining,
            capacity,
            zone: power_zone(remaining, capacity, thresholds)?,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.remaining / self.capacity
    }

    pub fn depleted(&self) -> bool {
        self.remaining <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadioAction {
    Transmit,
    Receive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SinkCorner {
    #[default]
    NorthWest,
    NorthEast,
    SouthWest,
    SouthEast,
}

impl SinkCorner {
    /// Corner coordinates with y pointing north.
    fn point(self, area: f64) -> Position {
        match self {
            SinkCorner::NorthWest => Position::new(0.0, area),
            SinkCorner::NorthEast => Position::new(area, area),
            SinkCorner::SouthWest => Position::new(0.0, 0.0),
            SinkCorner::SouthEast => Position::new(area, 0.0),
        }
    }
}

impl FromStr for SinkCorner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nw" | "northwest" => Ok(SinkCorner::NorthWest),
            "ne" | "northeast" => Ok(SinkCorner::NorthEast),
            "sw" | "southwest" => Ok(SinkCorner::SouthWest),
            "se" | "southeast" => Ok(SinkCorner::SouthEast),
            other => Err(format!("unknown corner '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub label: Option<String>,
    pub pos: Position,
    pub energy: EnergyState,
    /// Cleared by a failure directive.
    pub up: bool,
}

impl Node {
    /// Up and not depleted.
    pub fn is_live(&self) -> bool {
        self.up && !self.energy.depleted()
    }

    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.id.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub sink: NodeId,
    pub radio_range: f64,
    pub area: f64,
    pub energy: EnergyConfig,
    neighbors: Vec<Vec<NodeId>>,
}

impl Topology {
    /// Build from explicit positions. Neighbor lists are sorted by id.
    pub fn from_positions(
        positions: &[Position],
        area: f64,
        radio_range: f64,
        sink: NodeId,
        energy: EnergyConfig,
    ) -> Result<Self, TopologyError> {
        if positions.is_empty() {
            return Err(TopologyError::Empty);
        }
        if sink >= positions.len() {
            return Err(TopologyError::BadSink(sink));
        }
        let full = EnergyState::new(energy.capacity, energy.capacity, energy.thresholds)?;
        let mut nodes = Vec::with_capacity(positions.len());
        for (id, &pos) in positions.iter().enumerate() {
            if !(0.0..=area).contains(&pos.x) || !(0.0..=area).contains(&pos.y) {
                return Err(TopologyError::OutOfArea {
                    id,
                    x: pos.x,
                    y: pos.y,
                    area,
                });
            }
            nodes.push(Node {
                id,
                label: None,
                pos,
                energy: full,
                up: true,
            });
        }
        let neighbors = (0..nodes.len())
            .map(|a| {
                (0..nodes.len())
                    .filter(|&b| b != a && nodes[a].pos.distance(&nodes[b].pos) <= radio_range)
                    .collect()
            })
            .collect();
        Ok(Topology {
            nodes,
            sink,
            radio_range,
            area,
            energy,
            neighbors,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, id: NodeId) -> Position {
        self.nodes[id].pos
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.nodes[a].pos.distance(&self.nodes[b].pos)
    }

    /// Geometric neighbors, regardless of liveness.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.neighbors[id]
    }

    pub fn are_neighbors(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn is_live(&self, id: NodeId) -> bool {
        self.nodes[id].is_live()
    }

    pub fn zone(&self, id: NodeId) -> PowerZone {
        self.nodes[id].energy.zone
    }

    pub fn find_label(&self, label: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .find(|n| n.label.as_deref() == Some(label))
            .map(|n| n.id)
    }

    /// Set a node's battery level as a fraction of capacity.
    pub fn set_energy_ratio(&mut self, id: NodeId, ratio: f64) -> Result<(), TopologyError> {
        let cap = self.energy.capacity;
        self.nodes[id].energy = EnergyState::new(ratio * cap, cap, self.energy.thresholds)?;
        Ok(())
    }

    /// Charge `action` against the node's battery, clamping at zero.
    pub fn consume_energy(&mut self, id: NodeId, action: RadioAction) -> EnergyState {
        let cost = match action {
            RadioAction::Transmit => self.energy.tx_cost,
            RadioAction::Receive => self.energy.rx_cost,
        };
        let thresholds = self.energy.thresholds;
        let e = &mut self.nodes[id].energy;
        e.remaining = (e.remaining - cost).max(0.0);
        e.zone = power_zone(e.remaining, e.capacity, thresholds).expect("capacity validated at construction");
        *e
    }

    pub fn fail(&mut self, id: NodeId) {
        self.nodes[id].up = false;
    }

    pub fn revive(&mut self, id: NodeId) {
        self.nodes[id].up = true;
    }

    /// `id x y energy zone`, one line per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&format!(
                "{} {:.3} {:.3} {:.3} {}\n",
                n.id, n.pos.x, n.pos.y, n.energy.remaining, n.energy.zone
            ));
        }
        out
    }
}

/// Square grid: one node at the center of each tile, ids row-major from the
/// south-west tile. The sink is the node nearest `corner`.
pub fn deploy_grid(
    n: usize,
    area: f64,
    corner: SinkCorner,
    radio_range: f64,
    energy: EnergyConfig,
) -> Result<Topology, TopologyError> {
    if n == 0 {
        return Err(TopologyError::Empty);
    }
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n {
        return Err(TopologyError::NotSquare(n));
    }
    let tile = area / side as f64;
    let positions: Vec<Position> = (0..n)
        .map(|i| {
            let (row, col) = (i / side, i % side);
            Position::new((col as f64 + 0.5) * tile, (row as f64 + 0.5) * tile)
        })
        .collect();
    let sink = nearest(&positions, corner.point(area));
    Topology::from_positions(&positions, area, radio_range, sink, energy)
}

/// Uniform placement over the square; the sink is the node nearest the
/// center.
pub fn deploy_random<R: Rng + ?Sized>(
    n: usize,
    area: f64,
    radio_range: f64,
    energy: EnergyConfig,
    rng: &mut R,
) -> Result<Topology, TopologyError> {
    if n == 0 {
        return Err(TopologyError::Empty);
    }
    let positions: Vec<Position> = (0..n)
        .map(|_| Position::new(rng.gen_range(0.0..area), rng.gen_range(0.0..area)))
        .collect();
    let sink = nearest(&positions, Position::new(area / 2.0, area / 2.0));
    Topology::from_positions(&positions, area, radio_range, sink, energy)
}

/// Index of the position closest to `target`; lowest index on ties.
fn nearest(positions: &[Position], target: Position) -> NodeId {
    let mut best = 0;
    for (i, p) in positions.iter().enumerate().skip(1) {
        if p.distance(&target) < positions[best].distance(&target) {
            best = i;
        }
    }
    best
}
