//! Scenario configuration, closed-loop runs, telemetry and run comparison.

pub mod clearance;
pub mod compare;
pub mod config;
pub mod log;
pub mod metrics;
pub mod runner;
pub mod sweep;
pub mod trajectory;
pub mod units;

pub use clearance::{gap_clearance, Clearance};
pub use compare::{compare_logs, compare_runs, Comparison};
pub use config::{bundled, bundled_names, load_config, parse_config, ScenarioConfig};
pub use log::LogTable;
pub use metrics::RunMetrics;
pub use runner::{run_scenario, simulate, Diagnostics, RunOutcome};
pub use sweep::{run_batch, seed_batch, sweep_dir};
pub use trajectory::Trajectory;
