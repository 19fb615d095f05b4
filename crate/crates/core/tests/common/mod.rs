#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use rtsim_core::engine::NodeId;
use rtsim_core::harness::{parse_config, ScenarioConfig};
use rtsim_core::topology::Topology;

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn bundled(name: &str) -> ScenarioConfig {
    let path = configs_dir().join(format!("{name}.cfg"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub const BUNDLED: [&str; 5] = [
    "paper_grid",
    "paper_random",
    "paper_bursty",
    "fig2_repair",
    "alpha_sweep",
];

/// Hop distances to `sink` over the unit-disk graph rebuilt from positions,
/// skipping nodes rejected by `allowed` (the sink is always allowed).
pub fn bfs_oracle(topo: &Topology, sink: NodeId, range: f64, allowed: impl Fn(NodeId) -> bool) -> Vec<Option<u32>> {
    let mut dist = vec![None; topo.len()];
    dist[sink] = Some(0);
    let mut q = VecDeque::from([sink]);
    while let Some(u) = q.pop_front() {
        let du = dist[u].unwrap();
        let pu = topo.position(u);
        for (v, d) in dist.iter_mut().enumerate() {
            if d.is_none() && allowed(v) && pu.distance(&topo.position(v)) <= range {
                *d = Some(du + 1);
                q.push_back(v);
            }
        }
    }
    dist
}
