use std::path::{Path, PathBuf};

use super::config::{load_config, ScenarioConfig};
use super::metrics::RunMetrics;
use super::runner::{run_scenario, simulate, RunOutcome};
use crate::error::Result;
use crate::parallel::{map, Execution};

/// Scenario files (`*.toml`) in `dir`, sorted by name.
pub fn scenario_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs independent scenarios in memory.
pub fn run_batch(configs: &[ScenarioConfig], mode: Execution) -> Vec<Result<RunOutcome>> {
    map(configs, mode, simulate)
}

/// One scenario under several disturbance seeds.
pub fn seed_batch(config: &ScenarioConfig, seeds: &[u64], mode: Execution) -> Vec<Result<RunMetrics>> {
    map(seeds, mode, |&seed| {
        let cfg = ScenarioConfig { seed, ..config.clone() };
        simulate(&cfg).map(|o| o.metrics)
    })
}

/// Result of one file in a sweep.
#[derive(Debug)]
pub struct SweepEntry {
    pub source: PathBuf,
    pub result: Result<RunMetrics>,
}

/// Loads every scenario in `dir`, runs them and writes logs into `out_dir`.
/// `adjust` may override fields (seed, observer) before each run.
pub fn sweep_dir(
    dir: impl AsRef<Path>,
    out_dir: &Path,
    mode: Execution,
    adjust: impl Fn(&mut ScenarioConfig) + Sync + Send,
) -> Result<Vec<SweepEntry>> {
    let files = scenario_files(dir)?;
    Ok(map(&files, mode, |path| SweepEntry {
        source: path.clone(),
        result: load_config(path).and_then(|mut cfg| {
            adjust(&mut cfg);
            run_scenario(&cfg, out_dir).map(|(_, o)| o.metrics)
        }),
    }))
}
