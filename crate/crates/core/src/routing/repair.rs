//! Route maintenance after a broken link: local splice-in of a virtual node
//! (RRpr), falling back to an error report to the source (Err) and a fresh
//! flooded discovery (RReq).

use std::collections::VecDeque;

use super::{build_sp_routes, relay_ok, RouteEntry, Routes};
use crate::engine::NodeId;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairPhase {
    RReq,
    RRpr,
    Err,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairMessage {
    pub phase: RepairPhase,
    pub origin: NodeId,
    pub target: NodeId,
    pub path_so_far: Vec<NodeId>,
    pub seq: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepairOptions {
    pub vn: bool,
    pub power_aware: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepairOutcome {
    /// A virtual node replaced the failed hop.
    Spliced {
        vn: NodeId,
        path: Vec<NodeId>,
        messages: Vec<RepairMessage>,
    },
    /// The source rediscovered a route by flooding.
    Rediscovered {
        path: Vec<NodeId>,
        messages: Vec<RepairMessage>,
    },
    Failed {
        messages: Vec<RepairMessage>,
    },
}

impl RepairOutcome {
    pub fn messages(&self) -> &[RepairMessage] {
        match self {
            RepairOutcome::Spliced { messages, .. }
            | RepairOutcome::Rediscovered { messages, .. }
            | RepairOutcome::Failed { messages } => messages,
        }
    }

    pub fn control_messages(&self) -> u32 {
        self.messages().len() as u32
    }

    pub fn path(&self) -> Option<&[NodeId]> {
        match self {
            RepairOutcome::Spliced { path, .. } | RepairOutcome::Rediscovered { path, .. } => Some(path),
            RepairOutcome::Failed { .. } => None,
        }
    }

    /// Longest chain of messages that must happen one after another.
    pub fn latency_hops(&self) -> u32 {
        let msgs = self.messages();
        let count = |p: RepairPhase| msgs.iter().filter(|m| m.phase == p).count() as u32;
        match self {
            RepairOutcome::Spliced { .. } => count(RepairPhase::RRpr),
            _ => {
                let depth = msgs
                    .iter()
                    .filter(|m| m.phase == RepairPhase::RReq && m.target != m.origin)
                    .map(|m| m.path_so_far.len() as u32)
                    .max()
                    .unwrap_or(0);
                count(RepairPhase::Err) + depth
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloodResult {
    /// First-arrival path from origin to target.
    pub path: Option<Vec<NodeId>>,
    /// One broadcast per node that (re)transmitted the request.
    pub broadcasts: Vec<RepairMessage>,
}

/// Flood a route request from `origin`. Every eligible node rebroadcasts
/// the first copy it hears (duplicate suppression on `(origin, seq)`); the
/// first copy reaching `target` fixes the reverse path. Neighbors are
/// visited in id order.
pub fn flood_rreq(topo: &Topology, origin: NodeId, target: NodeId, seq: u32, power_aware: bool) -> FloodResult {
    let n = topo.len();
    let mut seen = vec![false; n];
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut broadcasts = Vec::new();
    let mut q = VecDeque::new();
    if !topo.is_live(origin) {
        return FloodResult { path: None, broadcasts };
    }
    seen[origin] = true;
    q.push_back(origin);
    let path_to = |parent: &[Option<NodeId>], mut v: NodeId| {
        let mut p = vec![v];
        while let Some(u) = parent[v] {
            p.push(u);
            v = u;
        }
        p.reverse();
        p
    };
    while let Some(u) = q.pop_front() {
        if u == target {
            continue;
        }
        if u != origin && !relay_ok(topo, u, power_aware) {
            continue;
        }
        broadcasts.push(RepairMessage {
            phase: RepairPhase::RReq,
            origin,
            target,
            path_so_far: path_to(&parent, u),
            seq,
        });
        for &v in topo.neighbors(u) {
            if !seen[v] && topo.is_live(v) {
                seen[v] = true;
                parent[v] = Some(u);
                q.push_back(v);
            }
        }
    }
    let path = seen[target].then(|| path_to(&parent, target));
    FloodResult { path, broadcasts }
}

/// Repair the route at `broken_at` after its next hop `failed` became
/// unreachable. `upstream` is the path the affected traffic took from its
/// source up to and including `broken_at`.
pub fn repair_route(
    routes: &mut Routes,
    topo: &Topology,
    broken_at: NodeId,
    failed: NodeId,
    upstream: &[NodeId],
    opts: RepairOptions,
    seq: u32,
) -> RepairOutcome {
    let sink = routes.sink;
    let source = upstream.first().copied().unwrap_or(broken_at);

    if opts.vn {
        if let Some(outcome) = try_splice(routes, topo, broken_at, failed, upstream, opts, seq) {
            return outcome;
        }
    }

    // Err back to the source along the reverse of the upstream path
    let mut messages = Vec::new();
    let mut back: Vec<NodeId> = upstream.iter().rev().copied().collect();
    if back.first() != Some(&broken_at) {
        back.insert(0, broken_at);
    }
    for i in 1..back.len() {
        messages.push(RepairMessage {
            phase: RepairPhase::Err,
            origin: broken_at,
            target: source,
            path_so_far: back[..=i].to_vec(),
            seq,
        });
    }

    let flood = flood_rreq(topo, source, sink, seq, opts.power_aware);
    messages.extend(flood.broadcasts);
    let Some(found) = flood.path else {
        *routes = build_sp_routes(topo, sink, opts.power_aware);
        return RepairOutcome::Failed { messages };
    };
    // route reply from the sink back along the discovered path
    let rev: Vec<NodeId> = found.iter().rev().copied().collect();
    for i in 1..rev.len() {
        messages.push(RepairMessage {
            phase: RepairPhase::RReq,
            origin: sink,
            target: source,
            path_so_far: rev[..=i].to_vec(),
            seq,
        });
    }
    *routes = build_sp_routes(topo, sink, opts.power_aware);
    match routes.path_from(source) {
        Some(path) => RepairOutcome::Rediscovered { path, messages },
        None => RepairOutcome::Failed { messages },
    }
}

fn try_splice(
    routes: &mut Routes,
    topo: &Topology,
    broken_at: NodeId,
    failed: NodeId,
    upstream: &[NodeId],
    opts: RepairOptions,
    seq: u32,
) -> Option<RepairOutcome> {
    let sink = routes.sink;
    // first live node after the failed run
    let mut downstream = vec![failed];
    let mut resume = failed;
    while !topo.is_live(resume) {
        if resume == sink {
            return None;
        }
        resume = routes.next_hop(resume)?;
        if downstream.contains(&resume) {
            return None;
        }
        downstream.push(resume);
    }
    let mut on_path: Vec<NodeId> = upstream.to_vec();
    on_path.push(broken_at);
    on_path.extend(routes.path_from(resume)?);

    let mut cands: Vec<NodeId> = topo
        .neighbors(broken_at)
        .iter()
        .copied()
        .filter(|&v| relay_ok(topo, v, opts.power_aware) && !on_path.contains(&v) && topo.are_neighbors(v, resume))
        .collect();
    cands.sort_by_key(|&v| (topo.zone(v), v));
    let vn = *cands.first()?;

    let resume_hops = routes.hop_count(resume).ok()?;
    let sink_pos = topo.position(sink);
    routes.set_entry(
        vn,
        Some(RouteEntry {
            destination: sink,
            next_hop: resume,
            hop_count: resume_hops + 1,
            euclidean_to_sink: topo.position(vn).distance(&sink_pos),
            virtual_nodes: Vec::new(),
        }),
    );
    if let Some(e) = routes.entries[broken_at].as_mut() {
        e.next_hop = vn;
    }
    routes.refresh_hop_counts();
    routes.refresh_virtual_nodes(topo);

    let messages = vec![
        RepairMessage {
            phase: RepairPhase::RRpr,
            origin: broken_at,
            target: vn,
            path_so_far: vec![broken_at, vn],
            seq,
        },
        RepairMessage {
            phase: RepairPhase::RRpr,
            origin: broken_at,
            target: resume,
            path_so_far: vec![broken_at, vn, resume],
            seq,
        },
    ];
    let source = upstream.first().copied().unwrap_or(broken_at);
    let path = routes.path_from(source)?;
    Some(RepairOutcome::Spliced { vn, path, messages })
}
