//! Closed-loop scenario execution.
//!
//! Per control tick: pending events fire, the observer advances with the
//! wrench applied over the last interval, the controller computes thrust and
//! torque, the mixer turns them into rotor thrusts (clamped to the rotor
//! limits) and a log row is written. The rotor thrusts are then held while
//! the plant integrates the sub-steps; the servo slews toward its command and
//! mass properties follow it on every sub-step.

use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::config::{PayloadAction, ScenarioConfig};
use super::log::LogTable;
use super::metrics::RunMetrics;
use crate::controller::{lyapunov_eval, CascadeController, ControllerState, LyapunovTruth};
use crate::dynamics::{
    apply_rotor_limits, b_and_c_matrices, euler_rate_matrix, step, Actuation, DisturbanceModel, Mixer, PlantParams,
    RigidBodyState,
};
use crate::error::{Error, Result};
use crate::math::rotation_zyx;
use crate::morphology::{frame_length, MorphState};
use crate::observer::{AppliedWrench, Measurement, ObserverModel, ObserverState};

/// Attitude beyond which a run counts as diverged [rad].
const TILT_LIMIT: f64 = 1.4;
/// Distance from the reference beyond which a run counts as diverged [m].
const POSITION_LIMIT: f64 = 100.0;

/// Closest approach to the slot walls while inside the gap corridor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapTransit {
    /// Smallest distance between the propeller envelope and a wall [m].
    pub min_margin: f64,
    /// Fold angle at the tick of closest approach.
    pub alpha_at_min: f64,
    pub ticks_inside: usize,
}

/// Runtime checks that are not part of the log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Ticks where `Kz2 - sigma2 C` had a negative diagonal entry.
    pub switching_gain_loss_ticks: usize,
    /// Largest `|Y b - (B zeta_r'' + C zeta_r')|` evaluated with the true inertia.
    pub max_regressor_residual: f64,
    pub final_mass_estimate: f64,
    pub final_inertia_estimate: [f64; 3],
    pub gap: Option<GapTransit>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub log: LogTable,
    pub metrics: RunMetrics,
    pub diagnostics: Diagnostics,
}

struct Vehicle {
    morph: MorphState,
    servo: f64,
    servo_command: f64,
    payload_mass: f64,
    payload_inertia: Vector3<f64>,
    mixer: Mixer,
}

impl Vehicle {
    fn plant(&self, base: &PlantParams) -> PlantParams {
        PlantParams {
            mass: base.mass + self.payload_mass,
            inertia: self.morph.inertia + self.payload_inertia,
            ..base.clone()
        }
    }
}

fn diverged(tick: usize, time: f64, reason: impl Into<String>) -> Error {
    Error::Divergence { tick, time, reason: reason.into() }
}

/// Fires events due at `time`; returns whether any did.
fn fire_events(
    cfg: &ScenarioConfig,
    time: f64,
    next_morph: &mut usize,
    next_payload: &mut usize,
    vehicle: &mut Vehicle,
    state: &mut RigidBodyState,
    base: &PlantParams,
) -> Result<bool> {
    const EPS: f64 = 1e-9;
    let mut fired = false;
    while let Some(m) = cfg.morph.get(*next_morph).filter(|m| m.time <= time + EPS) {
        vehicle.servo_command = m.servo;
        *next_morph += 1;
        fired = true;
    }
    while let Some(p) = cfg.payload.get(*next_payload).filter(|p| p.time <= time + EPS) {
        let before = vehicle.plant(base);
        let cube = p.mass * p.size * p.size / 6.0;
        match p.action {
            PayloadAction::Attach => {
                vehicle.payload_mass += p.mass;
                vehicle.payload_inertia += Vector3::repeat(cube);
                // The payload is picked up at rest: momentum is shared.
                let after = vehicle.plant(base);
                state.velocity *= before.mass / after.mass;
                let omega = state.body_rate()?;
                let omega = before.inertia.component_mul(&omega).component_div(&after.inertia);
                state.attitude_rate = euler_rate_matrix(&state.attitude)?
                    .lu()
                    .solve(&omega)
                    .ok_or(Error::Singularity { theta: state.attitude.y.abs() })?;
            }
            PayloadAction::Release => {
                vehicle.payload_mass = (vehicle.payload_mass - p.mass).max(0.0);
                vehicle.payload_inertia = (vehicle.payload_inertia - Vector3::repeat(cube)).map(|x| x.max(0.0));
            }
        }
        *next_payload += 1;
        fired = true;
    }
    Ok(fired)
}

/// Runs a scenario in memory.
pub fn simulate(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    let geom = &cfg.geometry;
    let base = cfg.plant.clone();
    let h = cfg.timing.plant_dt;
    let dt = cfg.timing.control_dt;
    let substeps = cfg.timing.substeps();
    let ticks = cfg.tick_count();
    let airframe_mass = base.mass;

    let morph = MorphState::from_servo(cfg.initial_servo, geom, &cfg.masses)?;
    let mut vehicle = Vehicle {
        mixer: Mixer::new(morph.fold, geom, &base)?,
        morph,
        servo: cfg.initial_servo,
        servo_command: cfg.initial_servo,
        payload_mass: 0.0,
        payload_inertia: Vector3::zeros(),
    };
    let mut plant: PlantParams;

    let start = cfg.trajectory.sample(0.0);
    let mut state = RigidBodyState::at_rest(start.position);
    state.attitude.z = start.yaw;

    let mut disturbance = DisturbanceModel::new(cfg.disturbance.clone(), geom.clone(), cfg.seed);
    let mut current_d = disturbance.sample(vehicle.morph.fold, h)?;

    let limits = (cfg.disturbance.force_bound, cfg.disturbance.torque_bound);
    let observer_model = |v: &Vehicle| ObserverModel { mass: airframe_mass, inertia: v.morph.inertia, gravity: base.gravity };
    let measure = |s: &RigidBodyState| -> Result<Measurement> {
        Ok(Measurement { velocity: s.velocity, body_rate: s.body_rate()? })
    };
    let mut observer = ObserverState::new(&measure(&state)?, &observer_model(&vehicle), limits)?;
    let mut controller = CascadeController::new(
        cfg.gains.clone(),
        ControllerState::new(cfg.mass_estimate_ratio * airframe_mass, vehicle.morph.inertia),
        base.gravity,
        cfg.observer,
    );

    let mut log = LogTable::new();
    log.rows.reserve(ticks);
    let mut diagnostics = Diagnostics {
        switching_gain_loss_ticks: 0,
        max_regressor_residual: 0.0,
        final_mass_estimate: 0.0,
        final_inertia_estimate: [0.0; 3],
        gap: None,
    };
    let mut gap_transit: Option<GapTransit> = None;
    let (mut next_morph, mut next_payload) = (0, 0);
    let mut applied = AppliedWrench::default();
    let mut event_pending = false;
    let max_thrust = base.max_rotor_thrust();

    for tick in 0..ticks {
        let t = tick as f64 * dt;
        event_pending |= fire_events(cfg, t, &mut next_morph, &mut next_payload, &mut vehicle, &mut state, &base)?;
        plant = vehicle.plant(&base);

        let meas = measure(&state)?;
        if tick > 0 {
            observer = observer
                .update(&cfg.observer_gains, &meas, &observer_model(&vehicle), &applied, dt)
                .map_err(|e| diverged(tick, t, e.to_string()))?;
        }
        let setpoint = cfg.trajectory.sample(t);
        let out = controller
            .update(&setpoint, &state, &observer.force_estimate, &observer.torque_estimate_body, dt)
            .map_err(|e| diverged(tick, t, e.to_string()))?;
        let (rotor, saturated) = apply_rotor_limits(&vehicle.mixer.thrusts(out.thrust, &out.torque_body), max_thrust);

        // Lyapunov instrumentation against the true plant.
        let zeta = state.attitude;
        let t_mat = euler_rate_matrix(&zeta)?;
        let (b_true, c_true) = b_and_c_matrices(&zeta, &state.attitude_rate, &plant.inertia)?;
        let (f_used, tau_used_b) = if cfg.observer {
            (observer.force_estimate, observer.torque_estimate_body)
        } else {
            (Vector3::zeros(), Vector3::zeros())
        };
        let truth = LyapunovTruth {
            mass: plant.mass,
            inertia: plant.inertia,
            inertia_matrix: b_true,
            force_residual: current_d.force - f_used,
            torque_residual: t_mat.transpose() * (current_d.torque_body - tau_used_b),
        };
        let used = ControllerState::new(out.mass_estimate, out.inertia_estimate);
        let (v, vdot) = lyapunov_eval(
            &used,
            &controller.gains,
            &out.position.delta,
            &out.position.sat,
            &out.attitude.delta,
            &out.attitude.sat,
            &truth,
        );
        let lhs = b_true * out.attitude.ref_accel + c_true * out.attitude.ref_rate;
        let residual = (out.attitude.regressor * plant.inertia - lhs).amax();
        debug_assert!(residual <= 1e-9 * (1.0 + lhs.amax()), "regressor mismatch {residual}");
        diagnostics.max_regressor_residual = diagnostics.max_regressor_residual.max(residual);
        let switching = Matrix3::from_diagonal(&controller.gains.attitude_switch) - controller.gains.attitude_layer * out.attitude.coriolis;
        if switching.diagonal().iter().any(|d| *d < 0.0) {
            diagnostics.switching_gain_loss_ticks += 1;
        }

        if let Some(gap) = &cfg.gap {
            if (gap.entry..=gap.exit).contains(&state.position.x) {
                let width = frame_length(vehicle.morph.fold, geom)? + 2.0 * geom.prop_overhang;
                let margin = 0.5 * gap.width - ((state.position.y - gap.center).abs() + 0.5 * width);
                let g = gap_transit.get_or_insert(GapTransit {
                    min_margin: f64::INFINITY,
                    alpha_at_min: vehicle.morph.fold,
                    ticks_inside: 0,
                });
                g.ticks_inside += 1;
                if margin < g.min_margin {
                    g.min_margin = margin;
                    g.alpha_at_min = vehicle.morph.fold;
                }
            }
        }

        let (applied_thrust, _) = vehicle.mixer.wrench(&rotor);
        let mut row = Vec::with_capacity(log.header.len());
        row.push(t);
        for vec in [
            state.position,
            setpoint.position,
            state.attitude,
            out.target.angles,
            state.velocity,
            meas.body_rate,
            out.force,
            out.torque,
            observer.force_estimate,
            observer.torque_estimate_body,
        ] {
            row.extend(vec.iter());
        }
        row.push(out.mass_estimate);
        row.extend(out.inertia_estimate.iter());
        row.extend([v, vdot, vehicle.morph.fold, if saturated { 1.0 } else { 0.0 }]);
        for vec in [
            out.position.surface,
            out.attitude.surface,
            out.position.delta,
            out.attitude.delta,
            current_d.force,
            current_d.torque_body,
        ] {
            row.extend(vec.iter());
        }
        row.extend([applied_thrust, plant.mass, if event_pending { 1.0 } else { 0.0 }]);
        event_pending = false;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(diverged(tick, t, "non-finite value in log row"));
        }
        log.rows.push(row);

        if tick + 1 == ticks {
            break;
        }

        let mut force_sum = Vector3::zeros();
        let mut torque_sum = Vector3::zeros();
        for j in 0..substeps {
            let ts = t + j as f64 * h;
            if j > 0 {
                event_pending |= fire_events(cfg, ts, &mut next_morph, &mut next_payload, &mut vehicle, &mut state, &base)?;
            }
            let slew = (vehicle.servo_command - vehicle.servo).clamp(-cfg.servo_rate * h, cfg.servo_rate * h);
            if slew != 0.0 {
                vehicle.servo += slew;
                vehicle.morph = MorphState::from_servo(vehicle.servo, geom, &cfg.masses)?;
                vehicle.mixer = Mixer::new(vehicle.morph.fold, geom, &base)?;
            }
            plant = vehicle.plant(&base);
            let (thrust, torque) = vehicle.mixer.wrench(&rotor);
            force_sum += rotation_zyx(&state.attitude) * Vector3::new(0.0, 0.0, thrust);
            torque_sum += torque;
            state = step(&state, &plant, &Actuation::Body { thrust, torque }, &current_d, h)
                .map_err(|e| diverged(tick, ts, e.to_string()))?;
            check_state(&state, &setpoint.position, tick, ts)?;
            current_d = disturbance.sample(vehicle.morph.fold, h)?;
        }
        applied = AppliedWrench { force: force_sum / substeps as f64, torque_body: torque_sum / substeps as f64 };
    }

    diagnostics.final_mass_estimate = controller.state.mass_estimate;
    diagnostics.final_inertia_estimate = controller.state.inertia_estimate.into();
    diagnostics.gap = gap_transit;
    let metrics = RunMetrics::from_log(&log, cfg.settle_band)?;
    Ok(RunOutcome { log, metrics, diagnostics })
}

fn check_state(state: &RigidBodyState, reference: &Vector3<f64>, tick: usize, time: f64) -> Result<()> {
    if !state.is_finite() {
        return Err(diverged(tick, time, "non-finite state"));
    }
    if state.attitude.x.abs() > TILT_LIMIT || state.attitude.y.abs() > TILT_LIMIT {
        return Err(diverged(tick, time, format!("tilt exceeded {TILT_LIMIT} rad")));
    }
    if (state.position - reference).norm() > POSITION_LIMIT {
        return Err(diverged(tick, time, format!("position error exceeded {POSITION_LIMIT} m")));
    }
    Ok(())
}

/// Paths written by [`run_scenario`].
#[derive(Clone, Debug, PartialEq)]
pub struct RunFiles {
    pub log: PathBuf,
    pub metrics: PathBuf,
}

/// Runs a scenario and writes `<name>.csv` and `<name>.metrics.json` into `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(RunFiles, RunOutcome)> {
    let outcome = simulate(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let files = RunFiles {
        log: out_dir.join(format!("{}.csv", cfg.name)),
        metrics: out_dir.join(format!("{}.metrics.json", cfg.name)),
    };
    outcome.log.write_csv(&files.log)?;
    std::fs::write(&files.metrics, serde_json::to_string_pretty(&outcome.metrics)?)?;
    Ok((files, outcome))
}
