use std::path::Path;

use serde::Serialize;

use super::log::LogTable;
use super::metrics::RunMetrics;
use crate::error::{Error, Result};

/// Settling of both runs after the same event.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SettlingPair {
    pub event_time: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

/// Ratios are `a / b`; two zeros compare as 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub rms_ratio: [f64; 3],
    pub max_axis_ratio: [f64; 3],
    pub max_error_ratio: f64,
    pub settling: Vec<SettlingPair>,
    pub a: RunMetrics,
    pub b: RunMetrics,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

pub fn compare_logs(a: &LogTable, b: &LogTable, settle_band: f64) -> Result<Comparison> {
    if a.header != b.header {
        return Err(Error::Schema("logs have different columns".into()));
    }
    if a.rows.len() != b.rows.len() {
        return Err(Error::Schema(format!("logs have {} and {} rows", a.rows.len(), b.rows.len())));
    }
    if a.rows.is_empty() {
        return Err(Error::Schema("logs are empty".into()));
    }
    if (a.duration() - b.duration()).abs() > 1e-9 {
        return Err(Error::Schema(format!("logs cover {} s and {} s", a.duration(), b.duration())));
    }
    let ma = RunMetrics::from_log(a, settle_band)?;
    let mb = RunMetrics::from_log(b, settle_band)?;
    let settling = if ma.settling.len() == mb.settling.len() {
        ma.settling
            .iter()
            .zip(&mb.settling)
            .map(|(x, y)| SettlingPair { event_time: x.event_time, a: x.settle_time, b: y.settle_time })
            .collect()
    } else {
        return Err(Error::Schema("logs have different event schedules".into()));
    };
    Ok(Comparison {
        rms_ratio: [0, 1, 2].map(|i| ratio(ma.rms_error[i], mb.rms_error[i])),
        max_axis_ratio: [0, 1, 2].map(|i| ratio(ma.max_axis_error[i], mb.max_axis_error[i])),
        max_error_ratio: ratio(ma.max_error, mb.max_error),
        settling,
        a: ma,
        b: mb,
    })
}

/// Compares two CSV logs written by the runner.
pub fn compare_runs(log_a: impl AsRef<Path>, log_b: impl AsRef<Path>, settle_band: f64) -> Result<Comparison> {
    compare_logs(&LogTable::read_csv(log_a)?, &LogTable::read_csv(log_b)?, settle_band)
}
