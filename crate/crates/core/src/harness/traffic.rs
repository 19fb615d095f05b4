use rand::Rng;

use crate::engine::{rng_stream, NodeId};
use crate::harness::config::{ScenarioConfig, TrafficMode};
use crate::sim::Workload;
use crate::topology::Topology;

/// Traffic streams use their own rng stream ids, above the node ids used
/// by the MAC.
const TRAFFIC_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficSource {
    pub node: NodeId,
    pub mode: TrafficMode,
    /// Seconds between publications.
    pub period: f64,
    pub burst_on: f64,
    pub burst_off: f64,
}

/// Publication times in `[0, until)`: a uniform phase in `[0, period)`, then
/// one every `period`. Bursty sources drop those falling in an off half of
/// the square wave, which starts on at t = 0.
pub fn generate_traffic<R: Rng + ?Sized>(src: &TrafficSource, until: f64, rng: &mut R) -> Vec<f64> {
    let phase = rng.gen_range(0.0..src.period);
    let cycle = src.burst_on + src.burst_off;
    (0..)
        .map(|k| phase + k as f64 * src.period)
        .take_while(|&t| t < until)
        .filter(|&t| src.mode == TrafficMode::Steady || t % cycle < src.burst_on)
        .collect()
}

/// On/off switch times of the network-wide burst pattern.
pub fn burst_toggles(on: f64, off: f64, until: f64) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    let mut t = 0.0;
    while t < until {
        out.push((t, true));
        if t + on < until {
            out.push((t + on, false));
        }
        t += on + off;
    }
    out
}

/// Build the publication schedule, toggles and failure script of one run.
pub fn build_workload(cfg: &ScenarioConfig, topo: &Topology, seed: u64) -> Workload {
    let sources: Vec<NodeId> = match &cfg.sources {
        Some(names) => names.iter().filter_map(|n| cfg.resolve(n)).collect(),
        None => (0..topo.len()).filter(|&n| n != topo.sink).collect(),
    };
    let publications = sources
        .into_iter()
        .map(|node| {
            let src = TrafficSource {
                node,
                mode: cfg.traffic,
                period: 1.0 / cfg.data_rate,
                burst_on: cfg.burst_on,
                burst_off: cfg.burst_off,
            };
            let mut rng = rng_stream(seed, TRAFFIC_STREAM_BASE + node as u64);
            (node, generate_traffic(&src, cfg.sim_time, &mut rng))
        })
        .collect();
    let toggles = match cfg.traffic {
        TrafficMode::Bursty => burst_toggles(cfg.burst_on, cfg.burst_off, cfg.sim_time),
        TrafficMode::Steady => Vec::new(),
    };
    let failures = cfg
        .failures
        .iter()
        .filter_map(|f| cfg.resolve(&f.node).map(|n| (n, f.at)))
        .collect();
    Workload {
        publications,
        toggles,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(mode: TrafficMode) -> TrafficSource {
        TrafficSource {
            node: 3,
            mode,
            period: 0.5,
            burst_on: 5.0,
            burst_off: 5.0,
        }
    }

    #[test]
    fn steady_rate_times_duration() {
        let mut rng = rng_stream(9, 3);
        let t = generate_traffic(&source(TrafficMode::Steady), 120.0, &mut rng);
        assert!((239..=241).contains(&t.len()));
        assert!(t.windows(2).all(|w| (w[1] - w[0] - 0.5).abs() < 1e-9));
    }

    #[test]
    fn bursty_is_half_duty() {
        let mut rng = rng_stream(9, 3);
        let t = generate_traffic(&source(TrafficMode::Bursty), 120.0, &mut rng);
        assert!((118..=122).contains(&t.len()), "{}", t.len());
        assert!(t.iter().all(|x| x % 10.0 < 5.0));
    }

    #[test]
    fn nodes_get_distinct_phases() {
        let cfg = ScenarioConfig::default();
        let topo = cfg.build_topology(1).unwrap();
        let w = build_workload(&cfg, &topo, 1);
        assert_eq!(w.publications.len(), 99);
        assert_ne!(w.publications[0].1[0], w.publications[1].1[0]);
        let again = build_workload(&cfg, &topo, 1);
        assert_eq!(w.publications, again.publications);
    }

    #[test]
    fn toggles_alternate() {
        let t = burst_toggles(5.0, 5.0, 20.0);
        assert_eq!(t, vec![(0.0, true), (5.0, false), (10.0, true), (15.0, false)]);
    }
}
