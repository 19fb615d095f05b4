//! Per-run packet accounting and the summary figures: miss ratio, drop
//! ratio, delay statistics, control overhead.

use std::collections::HashMap;
use std::fmt;

use crate::engine::PacketId;
use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropReason {
    MacFailure,
    QueueOverflow,
    GfVoid,
    RouteFailure,
}

impl DropReason {
    pub const ALL: [DropReason; 4] = [
        DropReason::MacFailure,
        DropReason::QueueOverflow,
        DropReason::GfVoid,
        DropReason::RouteFailure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DropReason::MacFailure => "MacFailure",
            DropReason::QueueOverflow => "QueueOverflow",
            DropReason::GfVoid => "GfVoid",
            DropReason::RouteFailure => "RouteFailure",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Delivered { delay: f64, on_time: bool },
    Dropped(DropReason),
}

impl Outcome {
    fn label(&self) -> &'static str {
        match self {
            Outcome::Delivered { on_time: true, .. } => "on-time delivery",
            Outcome::Delivered { on_time: false, .. } => "late delivery",
            Outcome::Dropped(r) => r.name(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsRecord {
    pub published: u64,
    pub delivered_on_time: u64,
    pub delivered_late: u64,
    pub dropped: u64,
    pub drop_reasons: [u64; 4],
    /// End-to-end delays of delivered packets, in delivery order.
    pub delays: Vec<f64>,
    pub control_messages: u64,
    terminal: HashMap<PacketId, &'static str>,
}

impl MetricsRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn publish(&mut self) {
        self.published += 1;
    }

    /// Record a packet's single terminal outcome.
    pub fn record(&mut self, packet: PacketId, outcome: Outcome) -> Result<(), SimError> {
        if let Some(first) = self.terminal.get(&packet) {
            return Err(SimError::DoubleTermination {
                packet,
                first,
                second: outcome.label(),
            });
        }
        self.terminal.insert(packet, outcome.label());
        match outcome {
            Outcome::Delivered { delay, on_time } => {
                if on_time {
                    self.delivered_on_time += 1;
                } else {
                    self.delivered_late += 1;
                }
                self.delays.push(delay);
            }
            Outcome::Dropped(reason) => {
                self.dropped += 1;
                self.drop_reasons[reason as usize] += 1;
            }
        }
        Ok(())
    }

    pub fn drops_for(&self, reason: DropReason) -> u64 {
        self.drop_reasons[reason as usize]
    }

    pub fn terminated(&self) -> u64 {
        self.delivered_on_time + self.delivered_late + self.dropped
    }

    /// Packets published but not terminated.
    pub fn in_flight(&self) -> u64 {
        self.published - self.terminated()
    }

    pub fn summarize(&self) -> Summary {
        let published = self.published;
        let in_flight = self.in_flight();
        let (miss_ratio, drop_ratio) = if published == 0 {
            (0.0, 0.0)
        } else {
            let p = published as f64;
            (
                (self.delivered_late + self.dropped + in_flight) as f64 / p,
                self.dropped as f64 / p,
            )
        };
        let mut sorted = self.delays.clone();
        sorted.sort_by(f64::total_cmp);
        Summary {
            published,
            on_time: self.delivered_on_time,
            late: self.delivered_late,
            dropped: self.dropped,
            in_flight,
            drop_reasons: self.drop_reasons,
            miss_ratio,
            drop_ratio,
            mean_delay: mean(&sorted),
            median_delay: quantile(&sorted, 0.5),
            p95_delay: quantile(&sorted, 0.95),
            control_messages: self.control_messages,
            no_traffic: published == 0,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Nearest-rank quantile of sorted data; 0 when empty.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub published: u64,
    pub on_time: u64,
    pub late: u64,
    pub dropped: u64,
    pub in_flight: u64,
    pub drop_reasons: [u64; 4],
    pub miss_ratio: f64,
    pub drop_ratio: f64,
    pub mean_delay: f64,
    pub median_delay: f64,
    pub p95_delay: f64,
    pub control_messages: u64,
    /// Nothing was published; ratios are reported as zero.
    pub no_traffic: bool,
}

impl Summary {
    /// published = on_time + late + dropped + in_flight
    pub fn conserves(&self) -> bool {
        self.published == self.on_time + self.late + self.dropped + self.in_flight
    }
}

pub const CSV_HEADER: &str = "scenario,policy,routing,deadline_s,alpha,seed,published,on_time,late,dropped,in_flight,miss_ratio,drop_ratio,mean_delay_s,p95_delay_s,control_msgs";

/// Identifies one run in a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct RunKey {
    pub scenario: String,
    pub policy: String,
    pub routing: String,
    pub deadline: f64,
    pub alpha: f64,
    pub seed: u64,
}

pub fn csv_row(key: &RunKey, s: &Summary) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{}",
        key.scenario,
        key.policy,
        key.routing,
        key.deadline,
        key.alpha,
        key.seed,
        s.published,
        s.on_time,
        s.late,
        s.dropped,
        s.in_flight,
        s.miss_ratio,
        s.drop_ratio,
        s.mean_delay,
        s.p95_delay,
        s.control_messages
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delivered(delay: f64, deadline: f64) -> Outcome {
        Outcome::Delivered {
            delay,
            on_time: delay <= deadline,
        }
    }

    #[test]
    fn on_time_and_mac_drop() {
        let mut m = MetricsRecord::new();
        m.publish();
        m.publish();
        m.record(1, delivered(0.9, 1.0)).unwrap();
        m.record(2, Outcome::Dropped(DropReason::MacFailure)).unwrap();
        assert_eq!(m.delivered_on_time, 1);
        assert_eq!(m.drops_for(DropReason::MacFailure), 1);
    }

    #[test]
    fn in_flight_counts_as_missed() {
        let mut m = MetricsRecord::new();
        m.publish();
        let s = m.summarize();
        assert_eq!(s.in_flight, 1);
        assert_eq!(s.miss_ratio, 1.0);
        assert_eq!(s.drop_ratio, 0.0);
    }

    #[test]
    fn ten_packet_example() {
        let mut m = MetricsRecord::new();
        for id in 0..10 {
            m.publish();
            let o = match id {
                0..=7 => delivered(0.5, 1.0),
                8 => delivered(1.5, 1.0),
                _ => Outcome::Dropped(DropReason::QueueOverflow),
            };
            m.record(id, o).unwrap();
        }
        let s = m.summarize();
        assert!((s.miss_ratio - 0.2).abs() < 1e-12);
        assert!((s.drop_ratio - 0.1).abs() < 1e-12);
        assert!(s.conserves());
    }

    #[test]
    fn perfect_and_total_loss() {
        let mut m = MetricsRecord::new();
        for id in 0..4 {
            m.publish();
            m.record(id, delivered(0.1, 1.0)).unwrap();
        }
        let s = m.summarize();
        assert_eq!((s.miss_ratio, s.drop_ratio), (0.0, 0.0));

        let mut m = MetricsRecord::new();
        for id in 0..4 {
            m.publish();
            m.record(id, Outcome::Dropped(DropReason::GfVoid)).unwrap();
        }
        let s = m.summarize();
        assert_eq!((s.miss_ratio, s.drop_ratio), (1.0, 1.0));
    }

    #[test]
    fn no_traffic_flagged() {
        let s = MetricsRecord::new().summarize();
        assert!(s.no_traffic);
        assert_eq!((s.miss_ratio, s.drop_ratio), (0.0, 0.0));
    }

    #[test]
    fn double_termination_rejected() {
        let mut m = MetricsRecord::new();
        m.publish();
        m.record(5, delivered(0.1, 1.0)).unwrap();
        let err = m.record(5, Outcome::Dropped(DropReason::MacFailure)).unwrap_err();
        assert!(matches!(err, SimError::DoubleTermination { packet: 5, .. }));
    }

    #[test]
    fn delay_statistics() {
        let mut m = MetricsRecord::new();
        for (id, d) in [0.4, 0.1, 0.3, 0.2].into_iter().enumerate() {
            m.publish();
            m.record(id as u64, delivered(d, 1.0)).unwrap();
        }
        let s = m.summarize();
        assert!((s.mean_delay - 0.25).abs() < 1e-12);
        assert_eq!(s.median_delay, 0.2);
        assert_eq!(s.p95_delay, 0.4);
    }

    #[test]
    fn csv_row_format() {
        let key = RunKey {
            scenario: "grid".into(),
            policy: "drts".into(),
            routing: "gf".into(),
            deadline: 1.5,
            alpha: 0.7,
            seed: 3,
        };
        let mut m = MetricsRecord::new();
        for id in 0..3 {
            m.publish();
            if id < 2 {
                m.record(id, delivered(0.25, 1.5)).unwrap();
            }
        }
        let row = csv_row(&key, &m.summarize());
        assert_eq!(
            row,
            "grid,drts,gf,1.5,0.7,3,3,2,0,0,1,0.333333,0.000000,0.250000,0.250000,0"
        );
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    }

    proptest::proptest! {
        #[test]
        fn drop_ratio_bounds_miss_ratio(outcomes in proptest::collection::vec(0u8..6, 0..300)) {
            let mut m = MetricsRecord::new();
            for (id, o) in outcomes.iter().enumerate() {
                m.publish();
                let out = match o {
                    0 => Some(delivered(0.1, 1.0)),
                    1 => Some(delivered(2.0, 1.0)),
                    2 => Some(Outcome::Dropped(DropReason::MacFailure)),
                    3 => Some(Outcome::Dropped(DropReason::QueueOverflow)),
                    4 => Some(Outcome::Dropped(DropReason::GfVoid)),
                    _ => None,
                };
                if let Some(out) = out {
                    m.record(id as u64, out).unwrap();
                }
            }
            let s = m.summarize();
            proptest::prop_assert!(s.conserves());
            proptest::prop_assert!(s.drop_ratio <= s.miss_ratio);
            proptest::prop_assert!((0.0..=1.0).contains(&s.miss_ratio));
            proptest::prop_assert!((0.0..=1.0).contains(&s.drop_ratio));
        }
    }
}
