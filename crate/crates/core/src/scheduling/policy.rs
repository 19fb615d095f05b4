//! Slack allocation: end-to-end delay projection and per-hop target delays
//! for the RTS variants, plus the velocity used by the VMS baselines.

use std::fmt;
use std::str::FromStr;

use crate::error::SchedError;

/// Largest exponent used by the geometric split; beyond it the target delay
/// is zero.
pub const MAX_EXPONENT: f64 = 60.0;
pub const DEFAULT_ALPHA: f64 = 0.7;
/// Floor on remaining time when computing DVM velocity, seconds.
pub const DEFAULT_DVM_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Hops,
    Euclidean,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Hops => "hops",
            Metric::Euclidean => "euclidean",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hops" | "hop" => Ok(Metric::Hops),
            "euclidean" | "euclid" | "meters" => Ok(Metric::Euclidean),
            other => Err(format!("unknown metric '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Srts,
    Drts,
    NlrtsStatic,
    NlrtsDynamic,
    Svm,
    Dvm,
    Fifo,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Srts,
        Variant::Drts,
        Variant::NlrtsStatic,
        Variant::NlrtsDynamic,
        Variant::Svm,
        Variant::Dvm,
        Variant::Fifo,
    ];

    pub fn is_vms(self) -> bool {
        matches!(self, Variant::Svm | Variant::Dvm)
    }

    pub fn is_rts(self) -> bool {
        matches!(
            self,
            Variant::Srts | Variant::Drts | Variant::NlrtsStatic | Variant::NlrtsDynamic
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Srts => "srts",
            Variant::Drts => "drts",
            Variant::NlrtsStatic => "nlrts",
            Variant::NlrtsDynamic => "nlrts-dynamic",
            Variant::Svm => "svm",
            Variant::Dvm => "dvm",
            Variant::Fifo => "fifo",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "srts" => Ok(Variant::Srts),
            "drts" => Ok(Variant::Drts),
            "nlrts" | "nlrts-static" => Ok(Variant::NlrtsStatic),
            "nlrts-dynamic" => Ok(Variant::NlrtsDynamic),
            "svm" => Ok(Variant::Svm),
            "dvm" => Ok(Variant::Dvm),
            "fifo" => Ok(Variant::Fifo),
            other => Err(format!("unknown policy '{other}'")),
        }
    }
}

/// EETD: one-hop estimate projected over the remaining distance. With the
/// hop metric pass `ohd = 1`.
pub fn compute_eetd(etd: f64, remaining_distance: f64, ohd: f64) -> Result<f64, SchedError> {
    if !(ohd > 0.0) {
        return Err(SchedError::NonPositiveOhd(ohd));
    }
    Ok(etd * remaining_distance / ohd)
}

/// Equal split of the slack `deadline - eetd` over `hops` forwarding nodes.
pub fn target_delay_static(deadline: f64, eetd: f64, hops: f64, alpha: f64) -> f64 {
    if !(hops > 0.0) {
        return 0.0;
    }
    (deadline - eetd).max(0.0) / hops * alpha
}

/// Equal split of what is left of the slack, recomputed at the current node.
pub fn target_delay_dynamic(deadline: f64, elapsed: f64, eetd: f64, hops: f64, alpha: f64) -> f64 {
    if !(hops > 0.0) {
        return 0.0;
    }
    let slack = (deadline - elapsed - eetd).max(0.0);
    slack / hops.max(1.0) * alpha
}

/// Geometric split: the slack divided by `2^exponent`, where the exponent
/// is the remaining distance in one-hop units.
pub fn target_delay_nonlinear(slack_basis: f64, eetd: f64, exponent: f64, alpha: f64) -> f64 {
    if !(exponent < MAX_EXPONENT) {
        return 0.0;
    }
    (slack_basis - eetd).max(0.0) / exponent.exp2() * alpha
}

/// Per-hop state the scheduler consumes. Distances are in the policy's
/// metric (hops or meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopContext {
    pub deadline: f64,
    pub elapsed: f64,
    pub etd: f64,
    /// Source-to-sink distance, fixed when the packet was created.
    pub source_distance: f64,
    /// Current node to sink.
    pub remaining_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy {
    pub variant: Variant,
    pub alpha: f64,
    pub metric: Metric,
    /// One-hop distance for the Euclidean metric, meters.
    pub ohd: f64,
    pub dvm_epsilon: f64,
}

impl Policy {
    pub fn new(variant: Variant, metric: Metric) -> Self {
        Policy {
            variant,
            alpha: DEFAULT_ALPHA,
            metric,
            ohd: crate::topology::DEFAULT_RADIO_RANGE_M,
            dvm_epsilon: DEFAULT_DVM_EPSILON,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    fn unit(&self) -> f64 {
        match self.metric {
            Metric::Hops => 1.0,
            Metric::Euclidean => self.ohd,
        }
    }

    /// Distance in hops. Euclidean distances round up and never give zero
    /// away from the sink.
    pub fn hops_equivalent(&self, distance: f64) -> f64 {
        match self.metric {
            Metric::Hops => distance,
            Metric::Euclidean if distance > 0.0 => (distance / self.ohd).ceil().max(1.0),
            Metric::Euclidean => 0.0,
        }
    }

    /// Exponent of the geometric split: integral hops, or real-valued
    /// `distance / ohd`.
    pub fn exponent(&self, distance: f64) -> f64 {
        distance / self.unit()
    }

    pub fn eetd(&self, etd: f64, distance: f64) -> f64 {
        compute_eetd(etd, distance, self.unit()).expect("ohd validated at load")
    }

    /// Intentional queuing delay at the current hop. Zero for the
    /// baselines, which never hold packets.
    pub fn target_delay(&self, ctx: &HopContext) -> f64 {
        let a = self.alpha;
        match self.variant {
            Variant::Srts => target_delay_static(
                ctx.deadline,
                self.eetd(ctx.etd, ctx.source_distance),
                self.hops_equivalent(ctx.source_distance),
                a,
            ),
            Variant::Drts => target_delay_dynamic(
                ctx.deadline,
                ctx.elapsed,
                self.eetd(ctx.etd, ctx.remaining_distance),
                self.hops_equivalent(ctx.remaining_distance),
                a,
            ),
            Variant::NlrtsStatic => {
                if ctx.remaining_distance <= 0.0 {
                    return 0.0;
                }
                target_delay_nonlinear(
                    ctx.deadline,
                    self.eetd(ctx.etd, ctx.source_distance),
                    self.exponent(ctx.remaining_distance),
                    a,
                )
            }
            Variant::NlrtsDynamic => {
                if ctx.remaining_distance <= 0.0 {
                    return 0.0;
                }
                target_delay_nonlinear(
                    ctx.deadline - ctx.elapsed,
                    self.eetd(ctx.etd, ctx.remaining_distance),
                    self.exponent(ctx.remaining_distance),
                    a,
                )
            }
            Variant::Svm | Variant::Dvm | Variant::Fifo => 0.0,
        }
    }

    /// Requested velocity (distance units per second) for the VMS
    /// baselines; `None` for every other variant.
    pub fn velocity(&self, ctx: &HopContext) -> Option<f64> {
        match self.variant {
            Variant::Svm => Some(ctx.source_distance / ctx.deadline),
            Variant::Dvm => Some(ctx.remaining_distance / (ctx.deadline - ctx.elapsed).max(self.dvm_epsilon)),
            _ => None,
        }
    }
}
