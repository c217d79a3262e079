use serde::{Deserialize, Serialize};

use super::log::LogTable;
use crate::error::Result;

/// Settling after one scheduled event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settling {
    pub event_time: f64,
    /// Time from the event until the position error stays inside the band up
    /// to the next event; `None` if it never does.
    pub settle_time: Option<f64>,
}

/// Summary of one run, computable from the log alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub ticks: usize,
    pub rms_error: [f64; 3],
    /// Largest per-axis absolute position error [m].
    pub max_axis_error: [f64; 3],
    /// Largest position error norm [m].
    pub max_error: f64,
    pub settling: Vec<Settling>,
    pub saturation_ticks: usize,
    pub vdot_min: f64,
    pub vdot_max: f64,
    /// RMS norm of the force estimation error over unsaturated ticks [N].
    pub observer_force_rms: f64,
    /// RMS norm of the torque estimation error over unsaturated ticks [N m].
    pub observer_torque_rms: f64,
}

fn triple(log: &LogTable, prefix: &str) -> Result<[usize; 3]> {
    Ok([log.index(&format!("{prefix}_x"))?, log.index(&format!("{prefix}_y"))?, log.index(&format!("{prefix}_z"))?])
}

impl RunMetrics {
    pub fn from_log(log: &LogTable, settle_band: f64) -> Result<Self> {
        let p = triple(log, "p")?;
        let pd = triple(log, "pd")?;
        let fhat = triple(log, "fhat")?;
        let fd = triple(log, "fd")?;
        let tauhat = triple(log, "tauhat")?;
        let taud = triple(log, "taud")?;
        let (t, vdot, sat, event) = (log.index("t")?, log.index("Vdot")?, log.index("sat_flag")?, log.index("event")?);

        let n = log.rows.len();
        let mut sq = [0.0; 3];
        let mut max_axis = [0.0f64; 3];
        let mut max_error = 0.0f64;
        let mut norms = Vec::with_capacity(n);
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut saturation_ticks = 0;
        let (mut f_sq, mut t_sq, mut clean) = (0.0, 0.0, 0usize);
        for row in &log.rows {
            let mut norm_sq = 0.0;
            for a in 0..3 {
                let e = row[p[a]] - row[pd[a]];
                sq[a] += e * e;
                max_axis[a] = max_axis[a].max(e.abs());
                norm_sq += e * e;
            }
            let norm = norm_sq.sqrt();
            max_error = max_error.max(norm);
            norms.push(norm);
            vmin = vmin.min(row[vdot]);
            vmax = vmax.max(row[vdot]);
            if row[sat] != 0.0 {
                saturation_ticks += 1;
            } else {
                clean += 1;
                for a in 0..3 {
                    f_sq += (row[fhat[a]] - row[fd[a]]).powi(2);
                    t_sq += (row[tauhat[a]] - row[taud[a]]).powi(2);
                }
            }
        }
        let denom = n.max(1) as f64;
        let rms_error = sq.map(|s| (s / denom).sqrt());
        let clean = clean.max(1) as f64;

        let events: Vec<usize> = (0..n).filter(|&i| log.rows[i][event] != 0.0).collect();
        let mut settling = Vec::with_capacity(events.len());
        for (k, &start) in events.iter().enumerate() {
            let end = events.get(k + 1).copied().unwrap_or(n);
            let mut settled_from = None;
            for i in (start..end).rev() {
                if norms[i] > settle_band {
                    break;
                }
                settled_from = Some(i);
            }
            let t0 = log.rows[start][t];
            settling.push(Settling { event_time: t0, settle_time: settled_from.map(|i| log.rows[i][t] - t0) });
        }

        Ok(Self {
            ticks: n,
            rms_error,
            max_axis_error: max_axis,
            max_error,
            settling,
            saturation_ticks,
            vdot_min: if n == 0 { 0.0 } else { vmin },
            vdot_max: if n == 0 { 0.0 } else { vmax },
            observer_force_rms: (f_sq / clean).sqrt(),
            observer_torque_rms: (t_sq / clean).sqrt(),
        })
    }
}
