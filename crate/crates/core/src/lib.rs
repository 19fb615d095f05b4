//! Discrete-event simulator for deadline-aware packet scheduling in
//! multi-hop wireless sensor networks.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod harness;
pub mod mac;
pub mod metrics;
pub mod routing;
pub mod scheduling;
pub mod sim;
pub mod topology;
