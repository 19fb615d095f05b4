//! The simulated network: per-node queues, ETD estimators and MAC state
//! wired to the engine, routing and metrics.

use crate::engine::{self, rng_stream, Event, EventKind, Handler, NodeId, PacketId, Scheduler, SimRng, TraceLine};
use crate::error::SimError;
use crate::mac::{draw_backoff, measure_hop_delay, Channel, MacConfig, TxAttempt, TxOutcome};
use crate::metrics::{DropReason, MetricsRecord, Outcome, Summary};
use crate::routing::{
    build_sp_routes, distance_to_sink, gf_next_hop, repair_route, Protocol, RepairOptions, RepairOutcome, Routes,
};
use crate::scheduling::{EtdEstimator, HopContext, HopRecord, Packet, Policy, ReleaseQueue};
use crate::topology::{PowerZone, RadioAction, Topology};

/// Everything that varies between two runs over the same topology.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    /// Relative end-to-end deadline, seconds.
    pub deadline: f64,
    pub policy: Policy,
    pub protocol: Protocol,
    pub power_aware: bool,
    pub vn: bool,
    pub mac: MacConfig,
    pub queue_capacity: usize,
    pub etd_smoothing: f64,
    pub sim_end: f64,
    /// Period of the battery-zone check that rebuilds power-aware routes.
    pub energy_check_interval: f64,
    pub trace: bool,
    /// Keep the node sequence of every delivered packet.
    pub record_paths: bool,
}

/// Publication schedule and scripted events for one run.
#[derive(Debug, Clone, Default)]
pub struct Workload {
    /// Publication times per source node, ascending.
    pub publications: Vec<(NodeId, Vec<f64>)>,
    /// Network-wide traffic on/off switches (bursty mode).
    pub toggles: Vec<(f64, bool)>,
    pub failures: Vec<(NodeId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub packet: PacketId,
    pub path: Vec<NodeId>,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairRecord {
    pub time: f64,
    pub broken_at: NodeId,
    pub failed: NodeId,
    pub outcome: RepairOutcome,
}

/// Channel activity counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MacStats {
    pub transmissions: u64,
    pub collisions: u64,
    /// Backoff expiries that found the medium busy.
    pub deferrals: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    pub mac: MacStats,
    pub events: u64,
    pub trace: Vec<TraceLine>,
    pub deliveries: Vec<Delivery>,
    pub repairs: Vec<RepairRecord>,
    pub routes: Routes,
}

#[derive(Debug)]
struct NodeState {
    etd: EtdEstimator,
    queue: ReleaseQueue<PacketId>,
    attempt: Option<TxAttempt>,
    on_air: Option<u64>,
    release_pending: Option<f64>,
    /// Packet parked while a route repair completes.
    held: Option<PacketId>,
    rng: SimRng,
    publications: Vec<f64>,
    next_publication: usize,
}

pub struct World {
    cfg: RunConfig,
    topo: Topology,
    routes: Routes,
    channel: Channel,
    nodes: Vec<NodeState>,
    packets: Vec<Option<Packet>>,
    metrics: MetricsRecord,
    trace: Vec<TraceLine>,
    deliveries: Vec<Delivery>,
    repairs: Vec<RepairRecord>,
    /// Velocity that maps to the top VMS class boundary.
    v_ref: f64,
    repair_seq: u32,
    zones: Vec<PowerZone>,
    traffic_on: bool,
    mac_stats: MacStats,
}

impl World {
    pub fn new(topo: Topology, workload: &Workload, cfg: RunConfig) -> Self {
        let routes = build_sp_routes(&topo, topo.sink, cfg.power_aware);
        let positions: Vec<_> = topo.nodes.iter().map(|n| n.pos).collect();
        let channel = Channel::new(&positions, cfg.mac.interference_range, cfg.mac.slot);
        let initial_etd = cfg.mac.frame_time() + cfg.mac.mean_idle_backoff();
        let mut nodes: Vec<NodeState> = (0..topo.len())
            .map(|i| NodeState {
                etd: EtdEstimator::with_initial(initial_etd, cfg.etd_smoothing),
                queue: ReleaseQueue::new(cfg.queue_capacity),
                attempt: None,
                on_air: None,
                release_pending: None,
                held: None,
                rng: rng_stream(cfg.seed, i as u64),
                publications: Vec::new(),
                next_publication: 0,
            })
            .collect();
        for (node, times) in &workload.publications {
            nodes[*node].publications = times.clone();
        }
        let max_dist = (0..topo.len())
            .filter_map(|v| distance_to_sink(v, cfg.policy.metric, &topo, &routes).ok())
            .fold(0.0, f64::max);
        let v_ref = if max_dist > 0.0 { max_dist / cfg.deadline } else { 1.0 };
        let zones = topo.nodes.iter().map(|n| n.energy.zone).collect();
        World {
            cfg,
            topo,
            routes,
            channel,
            nodes,
            packets: Vec::new(),
            metrics: MetricsRecord::new(),
            trace: Vec::new(),
            deliveries: Vec::new(),
            repairs: Vec::new(),
            v_ref,
            repair_seq: 0,
            zones,
            traffic_on: true,
            mac_stats: MacStats::default(),
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn routes(&self) -> &Routes {
        &self.routes
    }

    pub fn metrics(&self) -> &MetricsRecord {
        &self.metrics
    }

    /// Queue the initial events of a run.
    pub fn prime(&self, sched: &mut Scheduler, workload: &Workload) -> Result<(), SimError> {
        for (node, st) in self.nodes.iter().enumerate() {
            if let Some(&t) = st.publications.first() {
                sched.schedule(t, EventKind::Publish { node })?;
            }
        }
        for &(t, on) in &workload.toggles {
            sched.schedule(t, EventKind::TrafficToggle { on })?;
        }
        for &(node, t) in &workload.failures {
            if node >= self.topo.len() {
                return Err(SimError::UnknownNode(node));
            }
            sched.schedule(t, EventKind::NodeFail { node })?;
        }
        if self.cfg.power_aware && self.cfg.energy_check_interval > 0.0 {
            sched.schedule(self.cfg.energy_check_interval, EventKind::EnergyCheck)?;
        }
        sched.schedule(self.cfg.sim_end, EventKind::SimEnd)?;
        Ok(())
    }

    pub fn finish(self, events: u64) -> RunOutput {
        RunOutput {
            summary: self.metrics.summarize(),
            mac: self.mac_stats,
            events,
            trace: self.trace,
            deliveries: self.deliveries,
            repairs: self.repairs,
            routes: self.routes,
        }
    }

    fn name(&self, node: NodeId) -> String {
        self.topo.nodes[node].name()
    }

    fn note(&mut self, time: f64, kind: &'static str, node: Option<NodeId>, packet: Option<PacketId>, detail: String) {
        if self.cfg.trace {
            self.trace.push(TraceLine {
                time,
                kind,
                node,
                packet,
                detail,
            });
        }
    }

    fn packet(&self, id: PacketId) -> Result<&Packet, SimError> {
        self.packets
            .get(id as usize)
            .and_then(Option::as_ref)
            .ok_or(SimError::UnknownPacket(id))
    }

    fn packet_mut(&mut self, id: PacketId) -> Result<&mut Packet, SimError> {
        self.packets
            .get_mut(id as usize)
            .and_then(Option::as_mut)
            .ok_or(SimError::UnknownPacket(id))
    }

    fn drop_packet(&mut self, now: f64, node: NodeId, id: PacketId, reason: DropReason) -> Result<(), SimError> {
        self.metrics.record(id, Outcome::Dropped(reason))?;
        self.packets[id as usize] = None;
        self.note(now, "Drop", Some(node), Some(id), reason.name().to_string());
        Ok(())
    }

    fn deliver(&mut self, now: f64, id: PacketId) -> Result<(), SimError> {
        let p = self.packets[id as usize].take().ok_or(SimError::UnknownPacket(id))?;
        let delay = p.elapsed(now);
        let on_time = p.meets_deadline(now);
        self.metrics.record(id, Outcome::Delivered { delay, on_time })?;
        let mut path: Vec<NodeId> = p.path().collect();
        path.push(p.sink);
        if self.cfg.trace {
            let names: Vec<String> = path.iter().map(|&n| self.name(n)).collect();
            let detail = format!("delay={delay:.6} on_time={on_time} path={}", names.join("-"));
            self.note(now, "Deliver", Some(p.sink), Some(id), detail);
        }
        if self.cfg.record_paths {
            self.deliveries.push(Delivery {
                packet: id,
                path,
                delay,
            });
        }
        Ok(())
    }

    fn hop_context(&self, node: NodeId, id: PacketId, now: f64) -> Result<Option<HopContext>, SimError> {
        let p = self.packet(id)?;
        let Ok(remaining) = distance_to_sink(node, self.cfg.policy.metric, &self.topo, &self.routes) else {
            return Ok(None);
        };
        Ok(Some(HopContext {
            deadline: p.deadline,
            elapsed: p.elapsed(now),
            etd: self.nodes[node].etd.etd().unwrap_or(0.0),
            source_distance: p.source_distance,
            remaining_distance: remaining,
        }))
    }

    fn priority_class(&self, velocity: f64) -> u32 {
        let k = self.cfg.mac.priority_classes.max(1);
        let scaled = (velocity / self.v_ref * f64::from(k)).floor();
        if scaled.is_nan() || scaled < 0.0 {
            0
        } else {
            (scaled as u32).min(k - 1)
        }
    }

    fn on_publish(&mut self, node: NodeId, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        let st = &mut self.nodes[node];
        st.next_publication += 1;
        if let Some(&t) = st.publications.get(st.next_publication) {
            sched.schedule(t, EventKind::Publish { node })?;
        }
        if !self.topo.is_live(node) || node == self.topo.sink {
            return Ok(());
        }
        // unreachable sources stay silent
        let Ok(source_distance) = distance_to_sink(node, self.cfg.policy.metric, &self.topo, &self.routes) else {
            return Ok(());
        };
        let id = self.packets.len() as PacketId;
        self.packets.push(Some(Packet {
            id,
            source: node,
            sink: self.topo.sink,
            created_at: now,
            deadline: self.cfg.deadline,
            source_distance,
            target_delay_at_source: 0.0,
            hops_traversed: 0,
            per_hop_log: Vec::new(),
        }));
        self.metrics.publish();
        self.accept(node, id, now, sched)
    }

    /// A packet arrives at `node` (published there or received).
    fn accept(&mut self, node: NodeId, id: PacketId, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        let Some(ctx) = self.hop_context(node, id, now)? else {
            return self.drop_packet(now, node, id, DropReason::RouteFailure);
        };
        let policy = self.cfg.policy;
        let (evicted, release) = match policy.velocity(&ctx) {
            Some(v) => (self.nodes[node].queue.push(id, now, -v), now),
            None => {
                let td = policy.target_delay(&ctx);
                let p = self.packet_mut(id)?;
                if p.per_hop_log.is_empty() {
                    p.target_delay_at_source = td;
                }
                (
                    self.nodes[node].queue.enqueue_for_release(id, td, now),
                    now + td.max(0.0),
                )
            }
        };
        self.packet_mut(id)?.per_hop_log.push(HopRecord {
            node,
            arrive: now,
            release,
            delivered: None,
        });
        if let Some(victim) = evicted {
            self.drop_packet(now, node, victim, DropReason::QueueOverflow)?;
        }
        self.kick(node, now, sched)
    }

    /// Hand the next due packet to an idle MAC, or arrange to wake up when
    /// the head of the queue becomes due.
    fn kick(&mut self, node: NodeId, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        loop {
            let st = &self.nodes[node];
            if !self.topo.is_live(node) || st.attempt.is_some() || st.held.is_some() {
                return Ok(());
            }
            if let Some(id) = self.nodes[node].queue.pop_due(now) {
                if self.start_attempt(node, id, now, sched)? {
                    return Ok(());
                }
                continue;
            }
            let st = &mut self.nodes[node];
            if let Some(r) = st.queue.next_release() {
                if st.release_pending.is_none_or(|p| r < p) {
                    st.release_pending = Some(r);
                    sched.schedule(r, EventKind::QueueRelease { node })?;
                }
            }
            return Ok(());
        }
    }

    fn next_hop(&self, node: NodeId) -> Option<NodeId> {
        match self.cfg.protocol {
            Protocol::ShortestPath => self.routes.next_hop(node),
            Protocol::Greedy => gf_next_hop(node, self.topo.sink, &self.topo, self.cfg.power_aware),
        }
    }

    /// Returns whether the node is now busy with this packet (transmitting
    /// or repairing); `false` means the packet was dropped.
    fn start_attempt(&mut self, node: NodeId, id: PacketId, now: f64, sched: &mut Scheduler) -> Result<bool, SimError> {
        let Some(next) = self.next_hop(node) else {
            let reason = match self.cfg.protocol {
                Protocol::Greedy => DropReason::GfVoid,
                Protocol::ShortestPath => DropReason::RouteFailure,
            };
            self.drop_packet(now, node, id, reason)?;
            return Ok(false);
        };
        if !self.topo.is_live(next) {
            return self.link_broken(node, next, id, now, sched);
        }
        let class = if self.cfg.policy.variant.is_vms() {
            let ctx = self.hop_context(node, id, now)?;
            ctx.and_then(|c| self.cfg.policy.velocity(&c))
                .map(|v| self.priority_class(v))
        } else {
            None
        };
        let mut attempt = TxAttempt::new(node, next, id, class, now);
        // the hop delay sample counts the wait for the MAC after release
        if let Some(h) = self.packet(id)?.per_hop_log.last() {
            if h.node == node && h.release <= now {
                attempt.send_ready = h.release;
            }
        }
        self.nodes[node].attempt = Some(attempt);
        self.backoff(node, now, sched)?;
        Ok(true)
    }

    fn backoff(&mut self, node: NodeId, from: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        let mac = self.cfg.mac;
        let st = &mut self.nodes[node];
        let window = st.attempt.as_ref().map_or(mac.w0, |a| a.window(&mac));
        let slots = draw_backoff(window, &mut st.rng);
        sched.schedule(from + f64::from(slots) * mac.slot, EventKind::TxStart { node })?;
        Ok(())
    }

    fn on_tx_start(&mut self, node: NodeId, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        if !self.topo.is_live(node) || self.nodes[node].on_air.is_some() {
            return Ok(());
        }
        let Some(att) = self.nodes[node].attempt else {
            return Ok(());
        };
        if !self.topo.is_live(att.receiver) {
            self.nodes[node].attempt = None;
            if !self.link_broken(node, att.receiver, att.packet, now, sched)? {
                self.kick(node, now, sched)?;
            }
            return Ok(());
        }
        if let Some(busy_until) = self.channel.sensed_busy_until(node, now) {
            self.mac_stats.deferrals += 1;
            return self.backoff(node, busy_until, sched);
        }
        let duration = self.cfg.mac.frame_time();
        let tx = self.channel.begin(node, att.receiver, now, duration);
        self.nodes[node].on_air = Some(tx);
        self.mac_stats.transmissions += 1;
        self.topo.consume_energy(node, RadioAction::Transmit);
        sched.schedule(now + duration, EventKind::TxEnd { node, tx })?;
        Ok(())
    }

    fn on_tx_end(&mut self, node: NodeId, tx: u64, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        let ok = self.channel.finish(tx);
        if !self.topo.is_live(node) || self.nodes[node].on_air != Some(tx) {
            return Ok(());
        }
        self.nodes[node].on_air = None;
        let Some(mut att) = self.nodes[node].attempt else {
            return Ok(());
        };
        let receiver = att.receiver;
        if !self.topo.is_live(receiver) {
            self.nodes[node].attempt = None;
            if !self.link_broken(node, receiver, att.packet, now, sched)? {
                self.kick(node, now, sched)?;
            }
            return Ok(());
        }
        if !ok {
            self.mac_stats.collisions += 1;
            match att.on_collision(&self.cfg.mac) {
                TxOutcome::Collided => {
                    self.nodes[node].attempt = Some(att);
                    self.backoff(node, now, sched)?;
                }
                _ => {
                    self.nodes[node].attempt = None;
                    self.drop_packet(now, node, att.packet, DropReason::MacFailure)?;
                    self.kick(node, now, sched)?;
                }
            }
            return Ok(());
        }

        self.nodes[node].attempt = None;
        let sample = measure_hop_delay(att.send_ready, now);
        self.nodes[node].etd.update(sample)?;
        self.topo.consume_energy(receiver, RadioAction::Receive);
        let p = self.packet_mut(att.packet)?;
        p.hops_traversed += 1;
        if let Some(h) = p.per_hop_log.last_mut() {
            h.delivered = Some(now);
        }
        if receiver == self.topo.sink {
            self.deliver(now, att.packet)?;
        } else {
            self.accept(receiver, att.packet, now, sched)?;
        }
        self.kick(node, now, sched)
    }

    /// `node` found its next hop `failed` gone while holding packet `id`.
    fn link_broken(
        &mut self,
        node: NodeId,
        failed: NodeId,
        id: PacketId,
        now: f64,
        sched: &mut Scheduler,
    ) -> Result<bool, SimError> {
        if self.cfg.protocol == Protocol::Greedy {
            self.drop_packet(now, node, id, DropReason::RouteFailure)?;
            return Ok(false);
        }
        let mut upstream: Vec<NodeId> = self.packet(id)?.path().collect();
        upstream.dedup();
        if upstream.last() != Some(&node) {
            upstream.push(node);
        }
        self.repair_seq += 1;
        let opts = RepairOptions {
            vn: self.cfg.vn,
            power_aware: self.cfg.power_aware,
        };
        let outcome = repair_route(
            &mut self.routes,
            &self.topo,
            node,
            failed,
            &upstream,
            opts,
            self.repair_seq,
        );
        let msgs = outcome.control_messages();
        self.metrics.control_messages += u64::from(msgs);
        if self.cfg.trace {
            let names = |p: &[NodeId]| p.iter().map(|&n| self.name(n)).collect::<Vec<_>>().join("-");
            let detail = match &outcome {
                RepairOutcome::Spliced { vn, path, .. } => {
                    format!(
                        "RRpr failed={} vn={} path={} msgs={msgs}",
                        self.name(failed),
                        self.name(*vn),
                        names(path)
                    )
                }
                RepairOutcome::Rediscovered { path, .. } => {
                    format!("RReq failed={} path={} msgs={msgs}", self.name(failed), names(path))
                }
                RepairOutcome::Failed { .. } => format!("Failed failed={} msgs={msgs}", self.name(failed)),
            };
            self.note(now, "Repair", Some(node), Some(id), detail);
        }
        let latency =
            f64::from(outcome.latency_hops()) * (self.cfg.mac.frame_time() + self.cfg.mac.mean_idle_backoff());
        let failed_repair = matches!(outcome, RepairOutcome::Failed { .. });
        self.repairs.push(RepairRecord {
            time: now,
            broken_at: node,
            failed,
            outcome,
        });
        if failed_repair {
            self.drop_packet(now, node, id, DropReason::RouteFailure)?;
            return Ok(false);
        }
        self.nodes[node].held = Some(id);
        sched.schedule(now + latency, EventKind::RepairTimer { node, packet: id })?;
        Ok(true)
    }

    fn on_repair_done(&mut self, node: NodeId, id: PacketId, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        if self.nodes[node].held != Some(id) {
            return Ok(());
        }
        self.nodes[node].held = None;
        // re-enqueued for immediate release
        let rank = match self.hop_context(node, id, now)? {
            Some(ctx) => self.cfg.policy.velocity(&ctx).map_or(now, |v| -v),
            None => return self.drop_packet(now, node, id, DropReason::RouteFailure),
        };
        if let Some(victim) = self.nodes[node].queue.push(id, now, rank) {
            self.drop_packet(now, node, victim, DropReason::QueueOverflow)?;
        }
        self.kick(node, now, sched)
    }

    fn on_node_fail(&mut self, node: NodeId, now: f64) -> Result<(), SimError> {
        if !self.topo.is_live(node) {
            return Ok(());
        }
        self.topo.fail(node);
        let st = &mut self.nodes[node];
        let mut lost: Vec<PacketId> = st.queue.drain().collect();
        lost.extend(st.attempt.take().map(|a| a.packet));
        lost.extend(st.held.take());
        st.release_pending = None;
        st.on_air = None;
        for id in lost {
            self.drop_packet(now, node, id, DropReason::RouteFailure)?;
        }
        Ok(())
    }

    fn on_energy_check(&mut self, now: f64, sched: &mut Scheduler) -> Result<(), SimError> {
        let zones: Vec<PowerZone> = self.topo.nodes.iter().map(|n| n.energy.zone).collect();
        if zones != self.zones {
            self.routes = build_sp_routes(&self.topo, self.topo.sink, self.cfg.power_aware);
            self.zones = zones;
            self.note(now, "RouteRebuild", None, None, "battery zones changed".into());
        }
        let next = now + self.cfg.energy_check_interval;
        if next < self.cfg.sim_end {
            sched.schedule(next, EventKind::EnergyCheck)?;
        }
        Ok(())
    }
}

impl Handler for World {
    fn handle(&mut self, ev: &Event, sched: &mut Scheduler) -> Result<(), SimError> {
        let now = ev.time;
        if self.cfg.trace {
            let node = ev.kind.node();
            let packet = match ev.kind {
                EventKind::RepairTimer { packet, .. } => Some(packet),
                EventKind::TxStart { node } | EventKind::TxEnd { node, .. } => {
                    self.nodes[node].attempt.map(|a| a.packet)
                }
                _ => None,
            };
            let detail = match ev.kind {
                EventKind::TxStart { node } | EventKind::TxEnd { node, .. } => self.nodes[node]
                    .attempt
                    .map(|a| format!("to={} retries={}", self.name(a.receiver), a.retries))
                    .unwrap_or_default(),
                EventKind::TrafficToggle { on } => format!("on={on}"),
                EventKind::NodeFail { node } => format!("fail {}", self.name(node)),
                _ => node.map(|n| self.name(n)).unwrap_or_default(),
            };
            self.note(now, ev.kind.name(), node, packet, detail);
        }
        match ev.kind {
            EventKind::Publish { node } => self.on_publish(node, now, sched),
            EventKind::QueueRelease { node } => {
                let st = &mut self.nodes[node];
                if st.release_pending.is_some_and(|p| p <= now) {
                    st.release_pending = None;
                }
                self.kick(node, now, sched)
            }
            EventKind::TxStart { node } => self.on_tx_start(node, now, sched),
            EventKind::TxEnd { node, tx } => self.on_tx_end(node, tx, now, sched),
            EventKind::RepairTimer { node, packet } => self.on_repair_done(node, packet, now, sched),
            EventKind::EnergyCheck => self.on_energy_check(now, sched),
            EventKind::TrafficToggle { on } => {
                self.traffic_on = on;
                Ok(())
            }
            EventKind::NodeFail { node } => self.on_node_fail(node, now),
            EventKind::SimEnd => Ok(()),
        }
    }
}

/// Run one simulation to completion.
pub fn simulate(topo: Topology, workload: &Workload, cfg: RunConfig) -> Result<RunOutput, SimError> {
    let end = cfg.sim_end;
    let mut sched = Scheduler::new(end);
    let mut world = World::new(topo, workload, cfg);
    world.prime(&mut sched, workload)?;
    let events = engine::run(&mut sched, &mut world, end)?;
    Ok(world.finish(events))
}
