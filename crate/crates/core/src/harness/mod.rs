//! Scenario files, traffic generation and batch execution.

pub mod config;
pub mod experiment;
pub mod traffic;

pub use config::{parse_config, Deployment, ScenarioConfig, TrafficMode};
pub use experiment::{run_experiment, run_single, BatchResult, Job, PlotSeries, SweepPoint};
pub use traffic::{generate_traffic, TrafficSource};
