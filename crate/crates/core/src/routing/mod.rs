//! Shortest-path and greedy geographic routing, power-aware path selection,
//! and virtual-node route maintenance.

mod repair;

pub use repair::{flood_rreq, repair_route, FloodResult, RepairMessage, RepairOptions, RepairOutcome, RepairPhase};

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::engine::NodeId;
use crate::scheduling::Metric;
use crate::topology::{PowerZone, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    ShortestPath,
    Greedy,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::ShortestPath => "sp",
            Protocol::Greedy => "gf",
        }
    }

    /// The distance metric the scheduler pairs with this protocol.
    pub fn natural_metric(self) -> Metric {
        match self {
            Protocol::ShortestPath => Metric::Hops,
            Protocol::Greedy => Metric::Euclidean,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sp" => Ok(Protocol::ShortestPath),
            "gf" => Ok(Protocol::Greedy),
            other => Err(format!("unknown routing protocol '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualNodeEntry {
    pub vn: NodeId,
    pub protects: NodeId,
    pub battery_zone: PowerZone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteEntry {
    pub destination: NodeId,
    pub next_hop: NodeId,
    pub hop_count: u32,
    pub euclidean_to_sink: f64,
    /// Substitutes for `next_hop`.
    pub virtual_nodes: Vec<VirtualNodeEntry>,
}

/// Per-node routes toward a single sink.
#[derive(Debug, Clone)]
pub struct Routes {
    pub sink: NodeId,
    pub power_aware: bool,
    entries: Vec<Option<RouteEntry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unreachable(pub NodeId);

impl fmt::Display for Unreachable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {} has no route to the sink", self.0)
    }
}

impl std::error::Error for Unreachable {}

impl Routes {
    pub fn entry(&self, node: NodeId) -> Option<&RouteEntry> {
        self.entries[node].as_ref()
    }

    pub fn next_hop(&self, node: NodeId) -> Option<NodeId> {
        self.entries[node].as_ref().map(|e| e.next_hop)
    }

    pub fn is_reachable(&self, node: NodeId) -> bool {
        node == self.sink || self.entries[node].is_some()
    }

    pub fn hop_count(&self, node: NodeId) -> Result<u32, Unreachable> {
        if node == self.sink {
            return Ok(0);
        }
        self.entries[node]
            .as_ref()
            .map(|e| e.hop_count)
            .ok_or(Unreachable(node))
    }

    /// Follow next hops from `from` to the sink. `None` if the chain breaks
    /// or loops.
    pub fn path_from(&self, from: NodeId) -> Option<Vec<NodeId>> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != self.sink {
            cur = self.next_hop(cur)?;
            if path.contains(&cur) {
                return None;
            }
            path.push(cur);
        }
        Some(path)
    }

    pub(crate) fn set_entry(&mut self, node: NodeId, entry: Option<RouteEntry>) {
        self.entries[node] = entry;
    }

    /// Recompute hop counts from the next-hop chains; nodes whose chain no
    /// longer reaches the sink lose their route.
    pub(crate) fn refresh_hop_counts(&mut self) {
        for n in 0..self.entries.len() {
            if n == self.sink {
                continue;
            }
            match self.path_from(n) {
                Some(p) => {
                    if let Some(e) = self.entries[n].as_mut() {
                        e.hop_count = (p.len() - 1) as u32;
                    }
                }
                None => self.entries[n] = None,
            }
        }
    }

    /// Recompute every entry's virtual-node list against the current
    /// topology.
    pub fn refresh_virtual_nodes(&mut self, topo: &Topology) {
        for n in 0..self.entries.len() {
            let Some(path) = self.path_from(n) else { continue };
            if path.len() < 3 {
                if let Some(e) = self.entries[n].as_mut() {
                    e.virtual_nodes.clear();
                }
                continue;
            }
            let vns: Vec<_> = select_virtual_nodes(&path, topo)
                .into_iter()
                .filter(|v| v.protects == path[1])
                .collect();
            if let Some(e) = self.entries[n].as_mut() {
                e.virtual_nodes = vns;
            }
        }
    }
}

/// Whether a node may relay traffic.
fn relay_ok(topo: &Topology, node: NodeId, power_aware: bool) -> bool {
    topo.is_live(node) && !(power_aware && topo.zone(node) == PowerZone::Danger)
}

/// Shortest-path routes toward `sink` over live nodes.
///
/// Without power awareness this is breadth-first hop distance. With it,
/// Danger-zone nodes never relay and paths minimize (Critical relays, hops)
/// lexicographically. Ties go to the lowest next-hop id.
pub fn build_sp_routes(topo: &Topology, sink: NodeId, power_aware: bool) -> Routes {
    let n = topo.len();
    let crit = |v: NodeId| -> u32 { u32::from(power_aware && v != sink && topo.zone(v) == PowerZone::Critical) };
    // (critical relays, hops) from each node to the sink
    let mut cost: Vec<Option<(u32, u32)>> = vec![None; n];
    if topo.is_live(sink) {
        cost[sink] = Some((0, 0));
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(((0u32, 0u32), sink)));
        while let Some(Reverse((c, w))) = heap.pop() {
            if cost[w] != Some(c) {
                continue;
            }
            // only the sink and eligible relays extend paths
            if w != sink && !relay_ok(topo, w, power_aware) {
                continue;
            }
            for &v in topo.neighbors(w) {
                if !topo.is_live(v) {
                    continue;
                }
                let cand = (c.0 + crit(w), c.1 + 1);
                if cost[v].is_none_or(|old| cand < old) {
                    cost[v] = Some(cand);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
    }
    let sink_pos = topo.position(sink);
    let entries = (0..n)
        .map(|v| {
            let c = cost[v]?;
            if v == sink {
                return None;
            }
            let next_hop = topo.neighbors(v).iter().copied().find(|&w| {
                (w == sink || relay_ok(topo, w, power_aware))
                    && cost[w].is_some_and(|cw| (cw.0 + crit(w), cw.1 + 1) == c)
            })?;
            Some(RouteEntry {
                destination: sink,
                next_hop,
                hop_count: c.1,
                euclidean_to_sink: topo.position(v).distance(&sink_pos),
                virtual_nodes: Vec::new(),
            })
        })
        .collect();
    let mut routes = Routes {
        sink,
        power_aware,
        entries,
    };
    routes.refresh_virtual_nodes(topo);
    routes
}

/// Plain breadth-first hop distances over live nodes, kept separate from
/// `build_sp_routes` so tests can check one against the other.
pub fn bfs_hops(topo: &Topology, sink: NodeId, allowed: impl Fn(NodeId) -> bool) -> Vec<Option<u32>> {
    let mut dist = vec![None; topo.len()];
    if !allowed(sink) {
        return dist;
    }
    dist[sink] = Some(0);
    let mut q = VecDeque::from([sink]);
    while let Some(u) = q.pop_front() {
        for &v in topo.neighbors(u) {
            if dist[v].is_none() && allowed(v) {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Greedy geographic next hop: the live neighbor strictly closer to the
/// sink that makes the most progress, skipping Danger relays when power
/// aware. `None` at a void.
pub fn gf_next_hop(current: NodeId, sink: NodeId, topo: &Topology, power_aware: bool) -> Option<NodeId> {
    let sink_pos = topo.position(sink);
    let here = topo.position(current).distance(&sink_pos);
    let mut best: Option<(f64, NodeId)> = None;
    for &w in topo.neighbors(current) {
        if w != sink && !relay_ok(topo, w, power_aware) {
            continue;
        }
        let d = topo.position(w).distance(&sink_pos);
        if d >= here {
            continue;
        }
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, w));
        }
    }
    best.map(|(_, w)| w)
}

/// Virtual nodes for every interior node of `path`: live off-path nodes
/// adjacent to both its predecessor and successor. Ordered by path
/// position, then healthiest zone, then id.
pub fn select_virtual_nodes(path: &[NodeId], topo: &Topology) -> Vec<VirtualNodeEntry> {
    let mut out = Vec::new();
    if path.len() < 3 {
        return out;
    }
    for i in 1..path.len() - 1 {
        let (u, p, w) = (path[i - 1], path[i], path[i + 1]);
        let mut cands: Vec<VirtualNodeEntry> = topo
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&v| topo.is_live(v) && !path.contains(&v) && topo.are_neighbors(v, w))
            .map(|v| VirtualNodeEntry {
                vn: v,
                protects: p,
                battery_zone: topo.zone(v),
            })
            .collect();
        cands.sort_by_key(|e| (e.battery_zone, e.vn));
        out.extend(cands);
    }
    out
}

/// Routing-layer distance from `node` to the sink.
pub fn distance_to_sink(node: NodeId, metric: Metric, topo: &Topology, routes: &Routes) -> Result<f64, Unreachable> {
    match metric {
        Metric::Hops => routes.hop_count(node).map(f64::from),
        Metric::Euclidean => Ok(topo.distance(node, routes.sink)),
    }
}
