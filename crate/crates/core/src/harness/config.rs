//! Scenario files.
//!
//! Line-based `key = value` pairs, `#` comments, and `[section]` headers
//! that prefix the keys below them (`[mac]` then `w0 = 16` sets `mac.w0`;
//! `[scenario]` resets to top level). Two directives take no `=`:
//!
//! ```text
//! node A 170 10 0.05     # label, x, y, optional battery ratio
//! fail node G at 30.0    # kill a node (label or id) at a time
//! ```
//!
//! List-valued keys take comma-separated values; float lists also accept
//! `start:step:end`.

use std::str::FromStr;

use crate::engine::{rng_stream, NodeId, STREAM_DEPLOYMENT};
use crate::error::{ConfigError, TopologyError};
use crate::mac::MacConfig;
use crate::routing::Protocol;
use crate::scheduling::{Metric, Policy, Variant, DEFAULT_ALPHA, DEFAULT_QUEUE_CAPACITY, DEFAULT_SMOOTHING};
use crate::sim::RunConfig;
use crate::topology::{
    deploy_grid, deploy_random, EnergyConfig, Position, SinkCorner, Topology, DEFAULT_AREA_M, DEFAULT_RADIO_RANGE_M,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deployment {
    Grid,
    Random,
    /// Positions listed with `node` directives.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficMode {
    Steady,
    Bursty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub label: String,
    pub pos: Position,
    pub battery: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailSpec {
    /// Label or numeric id as written.
    pub node: String,
    pub at: f64,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub deployment: Deployment,
    pub node_count: usize,
    pub area: f64,
    pub radio_range: f64,
    pub sink_corner: SinkCorner,
    /// Sink by label or id (explicit deployments).
    pub sink: Option<String>,
    pub nodes: Vec<NodeSpec>,
    pub bandwidth_bps: f64,
    pub packet_bytes: f64,
    /// Packets per second per source.
    pub data_rate: f64,
    /// Publication window, seconds.
    pub sim_time: f64,
    /// Extra time after the publication window for packets to drain;
    /// `None` means one deadline.
    pub drain: Option<f64>,
    pub deadlines: Vec<f64>,
    pub seeds: Vec<u64>,
    pub traffic: TrafficMode,
    pub burst_on: f64,
    pub burst_off: f64,
    /// Publishing nodes; `None` means every node but the sink.
    pub sources: Option<Vec<String>>,
    pub policies: Vec<Variant>,
    pub alphas: Vec<f64>,
    /// `None` follows the routing protocol (hops for SP, meters for GF).
    pub metric: Option<Metric>,
    pub ohd: f64,
    pub queue_capacity: usize,
    pub etd_smoothing: f64,
    pub protocols: Vec<Protocol>,
    pub power_aware: bool,
    pub vn: bool,
    pub slot_us: f64,
    pub w0: u32,
    pub max_retries: u32,
    /// Defaults to the radio range.
    pub interference_range: Option<f64>,
    pub frame_overhead_us: f64,
    pub priority_classes: u32,
    pub energy: EnergyConfig,
    pub energy_check_interval: f64,
    pub failures: Vec<FailSpec>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "scenario".into(),
            deployment: Deployment::Grid,
            node_count: 100,
            area: DEFAULT_AREA_M,
            radio_range: DEFAULT_RADIO_RANGE_M,
            sink_corner: SinkCorner::NorthWest,
            sink: None,
            nodes: Vec::new(),
            bandwidth_bps: 2_000_000.0,
            packet_bytes: 32.0,
            data_rate: 2.0,
            sim_time: 120.0,
            drain: None,
            deadlines: vec![1.0],
            seeds: vec![1],
            traffic: TrafficMode::Steady,
            burst_on: 5.0,
            burst_off: 5.0,
            sources: None,
            policies: vec![Variant::Drts],
            alphas: vec![DEFAULT_ALPHA],
            metric: None,
            ohd: DEFAULT_RADIO_RANGE_M,
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            etd_smoothing: DEFAULT_SMOOTHING,
            protocols: vec![Protocol::ShortestPath],
            power_aware: false,
            vn: true,
            slot_us: 20.0,
            w0: 32,
            max_retries: 5,
            interference_range: None,
            frame_overhead_us: 0.0,
            priority_classes: 4,
            energy: EnergyConfig::default(),
            energy_check_interval: 1.0,
            failures: Vec::new(),
        }
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on/off, got '{v}'")),
    }
}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid number '{v}'"))
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Result<Vec<T>, String> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("'{s}': {e}")))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

/// Float list, either comma-separated or `start:step:end` (inclusive).
fn parse_floats(v: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    if parts.len() == 1 {
        return parse_list::<f64>(v);
    }
    let [a, step, b] = parts[..] else {
        return Err(format!("range must be start:step:end, got '{v}'"));
    };
    let (a, step, b): (f64, f64, f64) = (parse_num(a)?, parse_num(step)?, parse_num(b)?);
    if !(step > 0.0) || b < a {
        return Err(format!("bad range '{v}'"));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    // rounding keeps 0.1 steps printing as 0.3 rather than 0.30000000000000004
    Ok((0..=n).map(|i| ((a + step * i as f64) * 1e9).round() / 1e9).collect())
}

fn positive(v: f64, what: &str) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what} must be positive, got {v}"))
    }
}

fn all_positive(vs: Vec<f64>, what: &str) -> Result<Vec<f64>, String> {
    for &v in &vs {
        positive(v, what)?;
    }
    Ok(vs)
}

fn canonical(section: &str, key: &str) -> String {
    let full = if section.is_empty() || key.contains('.') {
        key.to_string()
    } else {
        format!("{section}.{key}")
    };
    match full.as_str() {
        "node_count" => "nodeCount",
        "radio_range" | "radio_range_m" => "radioRange",
        "packet_bytes" => "packetBytes",
        "data_rate" => "dataRate",
        "sim_time" => "simTime",
        "traffic" | "traffic.traffic" => "traffic.mode",
        "policy" => "sched.policy",
        "alpha" => "sched.alpha",
        "routing" | "routing.routing" => "routing.protocol",
        "deadlines" => "deadline",
        other => other,
    }
    .to_string()
}

impl ScenarioConfig {
    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "name" => {
                if v.is_empty() || v.contains([',', ' ', '/']) {
                    return Err(format!("scenario name '{v}' must be one word"));
                }
                self.name = v.to_string();
            }
            "deployment" => {
                self.deployment = match v {
                    "grid" => Deployment::Grid,
                    "random" => Deployment::Random,
                    "explicit" => Deployment::Explicit,
                    _ => return Err(format!("unknown deployment '{v}'")),
                }
            }
            "nodeCount" => {
                let n: i64 = parse_num(v)?;
                if n < 1 {
                    return Err(format!("nodeCount must be at least 1, got {n}"));
                }
                self.node_count = n as usize;
            }
            "area" => self.area = positive(parse_num(v)?, "area")?,
            "radioRange" => self.radio_range = positive(parse_num(v)?, "radioRange")?,
            "sink_corner" => self.sink_corner = v.parse()?,
            "sink" => self.sink = Some(v.to_string()),
            "bandwidth" => self.bandwidth_bps = positive(parse_num(v)?, "bandwidth")?,
            "packetBytes" => self.packet_bytes = positive(parse_num(v)?, "packetBytes")?,
            "dataRate" => self.data_rate = positive(parse_num(v)?, "dataRate")?,
            "simTime" => self.sim_time = positive(parse_num(v)?, "simTime")?,
            "drain" => {
                self.drain = match v {
                    "deadline" => None,
                    _ => {
                        let d: f64 = parse_num(v)?;
                        if !(d >= 0.0 && d.is_finite()) {
                            return Err(format!("drain must be nonnegative, got {d}"));
                        }
                        Some(d)
                    }
                }
            }
            "deadline" => self.deadlines = all_positive(parse_floats(v)?, "deadline")?,
            "seeds" => self.seeds = parse_list(v)?,
            "traffic.mode" => {
                self.traffic = match v {
                    "steady" => TrafficMode::Steady,
                    "bursty" => TrafficMode::Bursty,
                    _ => return Err(format!("unknown traffic mode '{v}'")),
                }
            }
            "traffic.burst_on" => self.burst_on = positive(parse_num(v)?, "burst_on")?,
            "traffic.burst_off" => self.burst_off = positive(parse_num(v)?, "burst_off")?,
            "traffic.sources" => self.sources = Some(parse_list(v)?),
            "sched.policy" => self.policies = parse_list(v)?,
            "sched.alpha" => {
                let alphas = parse_floats(v)?;
                if let Some(a) = alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
                    return Err(format!("alpha must lie in (0, 1], got {a}"));
                }
                self.alphas = alphas;
            }
            "sched.metric" => {
                self.metric = match v {
                    "auto" => None,
                    _ => Some(v.parse()?),
                }
            }
            "sched.ohd" => self.ohd = positive(parse_num(v)?, "ohd")?,
            "sched.queue_capacity" => {
                let c: i64 = parse_num(v)?;
                if c < 1 {
                    return Err(format!("queue_capacity must be at least 1, got {c}"));
                }
                self.queue_capacity = c as usize;
            }
            "sched.etd_smoothing" => {
                let s: f64 = parse_num(v)?;
                if !(s > 0.0 && s <= 1.0) {
                    return Err(format!("etd_smoothing must lie in (0, 1], got {s}"));
                }
                self.etd_smoothing = s;
            }
            "routing.protocol" => self.protocols = parse_list(v)?,
            "routing.power_aware" => self.power_aware = parse_bool(v)?,
            "routing.vn" => self.vn = parse_bool(v)?,
            "mac.slot_us" => self.slot_us = positive(parse_num(v)?, "slot_us")?,
            "mac.w0" => {
                let w: u32 = parse_num(v)?;
                if w < 2 {
                    return Err(format!("w0 must be at least 2, got {w}"));
                }
                self.w0 = w;
            }
            "mac.max_retries" => {
                let r: u32 = parse_num(v)?;
                if r > 16 {
                    return Err(format!("max_retries must be at most 16, got {r}"));
                }
                self.max_retries = r;
            }
            "mac.interference_range_m" => {
                self.interference_range = Some(positive(parse_num(v)?, "interference_range_m")?)
            }
            "mac.frame_overhead_us" => {
                let o: f64 = parse_num(v)?;
                if !(o >= 0.0 && o.is_finite()) {
                    return Err(format!("frame_overhead_us must be nonnegative, got {o}"));
                }
                self.frame_overhead_us = o;
            }
            "mac.priority_classes" => {
                let k: u32 = parse_num(v)?;
                if k < 1 {
                    return Err("priority_classes must be at least 1".into());
                }
                self.priority_classes = k;
            }
            "energy.capacity" => self.energy.capacity = positive(parse_num(v)?, "capacity")?,
            "energy.tx_cost" | "energy.rx_cost" => {
                let c: f64 = parse_num(v)?;
                if !(c >= 0.0) {
                    return Err(format!("energy cost must be nonnegative, got {c}"));
                }
                if key == "energy.tx_cost" {
                    self.energy.tx_cost = c;
                } else {
                    self.energy.rx_cost = c;
                }
            }
            "energy.active_threshold" => self.energy.thresholds.active = parse_num(v)?,
            "energy.danger_threshold" => self.energy.thresholds.danger = parse_num(v)?,
            "energy.check_interval" => self.energy_check_interval = positive(parse_num(v)?, "check_interval")?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    fn directive(&mut self, words: &[&str]) -> Result<(), String> {
        match words {
            ["node", label, x, y, rest @ ..] => {
                let battery = match rest {
                    [] => None,
                    [b] => {
                        let b: f64 = parse_num(b)?;
                        if !(0.0..=1.0).contains(&b) {
                            return Err(format!("battery ratio must lie in [0, 1], got {b}"));
                        }
                        Some(b)
                    }
                    _ => return Err("node takes: label x y [battery]".into()),
                };
                if self.nodes.iter().any(|n| n.label == *label) {
                    return Err(format!("duplicate node label '{label}'"));
                }
                self.nodes.push(NodeSpec {
                    label: label.to_string(),
                    pos: Position::new(parse_num(x)?, parse_num(y)?),
                    battery,
                });
                self.deployment = Deployment::Explicit;
                Ok(())
            }
            ["fail", "node", node, "at", t] => {
                let at: f64 = parse_num(t)?;
                if !(at >= 0.0) {
                    return Err(format!("failure time must be nonnegative, got {at}"));
                }
                self.failures.push(FailSpec {
                    node: node.to_string(),
                    at,
                    line: 0,
                });
                Ok(())
            }
            _ => Err(format!("malformed line '{}'", words.join(" "))),
        }
    }

    /// Node count after deployment.
    pub fn deployed_nodes(&self) -> usize {
        match self.deployment {
            Deployment::Explicit => self.nodes.len(),
            _ => self.node_count,
        }
    }

    /// Resolve a label or numeric id without building the topology.
    pub fn resolve(&self, name: &str) -> Option<NodeId> {
        if self.deployment == Deployment::Explicit {
            if let Some(i) = self.nodes.iter().position(|n| n.label == name) {
                return Some(i);
            }
        }
        name.parse::<NodeId>().ok().filter(|&i| i < self.deployed_nodes())
    }

    pub fn mac_config(&self) -> MacConfig {
        MacConfig {
            slot: self.slot_us / 1e6,
            w0: self.w0,
            max_retries: self.max_retries,
            interference_range: self.interference_range.unwrap_or(self.radio_range),
            frame_overhead: self.frame_overhead_us / 1e6,
            priority_classes: self.priority_classes,
            bandwidth_bps: self.bandwidth_bps,
            packet_bits: self.packet_bytes * 8.0,
        }
    }

    /// Deploy the nodes. Random deployments draw from the seed's deployment
    /// stream.
    pub fn build_topology(&self, seed: u64) -> Result<Topology, TopologyError> {
        match self.deployment {
            Deployment::Grid => deploy_grid(
                self.node_count,
                self.area,
                self.sink_corner,
                self.radio_range,
                self.energy,
            ),
            Deployment::Random => {
                let mut rng = rng_stream(seed, STREAM_DEPLOYMENT);
                deploy_random(self.node_count, self.area, self.radio_range, self.energy, &mut rng)
            }
            Deployment::Explicit => {
                let pos: Vec<Position> = self.nodes.iter().map(|n| n.pos).collect();
                let sink = self.sink.as_deref().and_then(|s| self.resolve(s)).unwrap_or(0);
                let mut topo = Topology::from_positions(&pos, self.area, self.radio_range, sink, self.energy)?;
                for (i, spec) in self.nodes.iter().enumerate() {
                    topo.nodes[i].label = Some(spec.label.clone());
                    if let Some(b) = spec.battery {
                        topo.set_energy_ratio(i, b)?;
                    }
                }
                Ok(topo)
            }
        }
    }

    pub fn metric_for(&self, protocol: Protocol) -> Metric {
        self.metric.unwrap_or(protocol.natural_metric())
    }

    pub fn run_config(&self, variant: Variant, protocol: Protocol, alpha: f64, deadline: f64, seed: u64) -> RunConfig {
        let mut policy = Policy::new(variant, self.metric_for(protocol)).with_alpha(alpha);
        policy.ohd = self.ohd;
        RunConfig {
            seed,
            deadline,
            policy,
            protocol,
            power_aware: self.power_aware,
            vn: self.vn,
            mac: self.mac_config(),
            queue_capacity: self.queue_capacity,
            etd_smoothing: self.etd_smoothing,
            sim_end: self.sim_time + self.drain.unwrap_or(deadline),
            energy_check_interval: self.energy_check_interval,
            trace: false,
            record_paths: false,
        }
    }

    /// Number of runs in the batch.
    pub fn run_count(&self) -> usize {
        self.policies.len() * self.protocols.len() * self.alphas.len() * self.deadlines.len() * self.seeds.len()
    }
}

impl FromStr for ScenarioConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        parse_config(text)
    }
}

/// Parse a scenario file; omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut section = String::new();
    let mut key_lines: Vec<(String, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line_no, "unterminated section header"))?
                .trim();
            section = match name {
                "scenario" | "" => String::new(),
                "sched" | "routing" | "mac" | "energy" | "traffic" => name.to_string(),
                other => return Err(ConfigError::new(line_no, format!("unknown section '{other}'"))),
            };
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            let key = canonical(&section, k.trim());
            cfg.set(&key, v.trim()).map_err(|m| ConfigError::new(line_no, m))?;
            key_lines.push((key, line_no));
        } else {
            let words: Vec<&str> = line.split_whitespace().collect();
            cfg.directive(&words).map_err(|m| ConfigError::new(line_no, m))?;
            if let Some(f) = cfg.failures.last_mut() {
                if f.line == 0 {
                    f.line = line_no;
                }
            }
        }
    }
    let line_of = |key: &str| key_lines.iter().rev().find(|(k, _)| k == key).map_or(0, |&(_, l)| l);
    validate(&cfg, &line_of)?;
    Ok(cfg)
}

fn validate(cfg: &ScenarioConfig, line_of: &dyn Fn(&str) -> usize) -> Result<(), ConfigError> {
    if cfg.deployment == Deployment::Grid {
        let side = (cfg.node_count as f64).sqrt().round() as usize;
        if side * side != cfg.node_count {
            return Err(ConfigError::new(
                line_of("nodeCount"),
                format!(
                    "grid deployment needs a perfect-square nodeCount, got {}",
                    cfg.node_count
                ),
            ));
        }
    }
    if cfg.deployment == Deployment::Explicit && cfg.nodes.is_empty() {
        return Err(ConfigError::new(
            line_of("deployment"),
            "explicit deployment lists no nodes",
        ));
    }
    for n in &cfg.nodes {
        if !(0.0..=cfg.area).contains(&n.pos.x) || !(0.0..=cfg.area).contains(&n.pos.y) {
            return Err(ConfigError::new(
                0,
                format!("node {} at ({}, {}) lies outside the area", n.label, n.pos.x, n.pos.y),
            ));
        }
    }
    let th = cfg.energy.thresholds;
    if !(0.0 <= th.danger && th.danger < th.active && th.active <= 1.0) {
        return Err(ConfigError::new(
            line_of("energy.danger_threshold").max(line_of("energy.active_threshold")),
            "thresholds need 0 <= danger < active <= 1",
        ));
    }
    if let Some(s) = &cfg.sink {
        if cfg.resolve(s).is_none() {
            return Err(ConfigError::new(line_of("sink"), format!("unknown sink node '{s}'")));
        }
    }
    if let Some(srcs) = &cfg.sources {
        if let Some(bad) = srcs.iter().find(|s| cfg.resolve(s).is_none()) {
            return Err(ConfigError::new(
                line_of("traffic.sources"),
                format!("unknown source node '{bad}'"),
            ));
        }
    }
    for f in &cfg.failures {
        if cfg.resolve(&f.node).is_none() {
            return Err(ConfigError::new(f.line, format!("unknown node '{}'", f.node)));
        }
        if f.at > cfg.sim_time {
            return Err(ConfigError::new(
                f.line,
                format!("failure at {} is after the end of the run", f.at),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::ZoneThresholds;

    #[test]
    fn empty_file_is_table_one() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(c.node_count, 100);
        assert_eq!(c.area, 1000.0);
        assert_eq!(c.radio_range, 250.0);
        assert_eq!(c.bandwidth_bps, 2e6);
        assert_eq!(c.packet_bytes, 32.0);
        assert_eq!(c.data_rate, 2.0);
        assert_eq!(c.sim_time, 120.0);
        assert_eq!(c.alphas, vec![0.7]);
        assert_eq!(c.energy.thresholds, ZoneThresholds::default());
    }

    #[test]
    fn deadline_sweep() {
        let c = parse_config("deadline = 0.5,1.0,1.5,2.0\nseeds = 1,2,3,4,5").unwrap();
        assert_eq!(c.deadlines, vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(c.run_count(), 20);
    }

    #[test]
    fn range_syntax() {
        let c = parse_config("deadline = 0.1:0.1:3.0").unwrap();
        assert_eq!(c.deadlines.len(), 30);
        assert_eq!(c.deadlines[2], 0.3);
        assert_eq!(c.deadlines[29], 3.0);
    }

    #[test]
    fn negative_node_count_names_its_line() {
        let e = parse_config("# comment\n\nnodeCount = -5").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.to_string().starts_with("line 3:"));
    }

    #[test]
    fn sections_prefix_keys() {
        let c = parse_config("[mac]\nw0 = 16\nslot_us = 10\n[sched]\npolicy = srts, svm\n[scenario]\nsimTime = 30")
            .unwrap();
        assert_eq!(c.w0, 16);
        assert_eq!(c.mac_config().slot, 10e-6);
        assert_eq!(c.policies, vec![Variant::Srts, Variant::Svm]);
        assert_eq!(c.sim_time, 30.0);
    }

    #[test]
    fn errors_are_line_numbered() {
        for (text, line) in [
            ("bogus = 1", 1),
            ("area = 10\nnodeCount = 99", 2),
            ("\n[mac]\nw0 = x", 3),
            ("sched.alpha = 0.5, 1.5", 1),
            ("just some words", 1),
            ("[nope]", 1),
            ("node A 1 1\nfail node Z at 3", 2),
        ] {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.line, line, "{text}: {e}");
        }
    }

    #[test]
    fn explicit_nodes_and_failures() {
        let text = "sink = B\nnode A 10 10\nnode B 100 10 0.05\nfail node A at 3.5\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.deployment, Deployment::Explicit);
        assert_eq!(c.resolve("B"), Some(1));
        let t = c.build_topology(1).unwrap();
        assert_eq!(t.sink, 1);
        assert_eq!(t.nodes[0].name(), "A");
        assert_eq!(t.zone(1), crate::topology::PowerZone::Danger);
        assert_eq!(c.failures[0].at, 3.5);
    }

    #[test]
    fn interference_defaults_to_radio_range() {
        let c = parse_config("radioRange = 200").unwrap();
        assert_eq!(c.mac_config().interference_range, 200.0);
        let c = parse_config("radioRange = 200\nmac.interference_range_m = 300").unwrap();
        assert_eq!(c.mac_config().interference_range, 300.0);
    }

    #[test]
    fn metric_follows_protocol() {
        let c = parse_config("").unwrap();
        assert_eq!(c.metric_for(Protocol::ShortestPath), Metric::Hops);
        assert_eq!(c.metric_for(Protocol::Greedy), Metric::Euclidean);
        let c = parse_config("sched.metric = hops").unwrap();
        assert_eq!(c.metric_for(Protocol::Greedy), Metric::Hops);
    }
}
