//! Cascade adaptive sliding-mode controller.
//!
//! Position loop (inertial frame):
//!
//! ```text
//! s1 = e1' + L1 e1,   p_r' = p_d' - L1 e1,   D1 = s1 - sigma1 sat(s1 / sigma1)
//! f  = m_hat (g + p_r'') - Kp1 D1 - Kp2 sat(s1 / sigma1) - f_hat
//! ```
//!
//! The force direction and the desired yaw give the roll/pitch setpoint, and
//! the attitude loop (Euler-angle dynamics) closes with
//!
//! ```text
//! tau = Y b_hat - Kz1 D2 - (Kz2 - sigma2 C) sat(s2 / sigma2) - tau_hat
//! ```
//!
//! where `Y b = B zeta_r'' + C zeta_r'` is linear in the principal inertias.
//! Mass and inertia estimates follow the gradient laws
//! `m_hat' = -(g + p_r'')^T D1 / Gamma1` and `b_hat' = -Gamma2^-1 Y^T D2`.
//! Inside the boundary layers `D = 0` and adaptation stops.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dynamics::{b_and_c_matrices, euler_rate_matrix, euler_to_body_torque, RigidBodyState};
use crate::error::{Error, Result};
use crate::math::wrap_angle;

/// Smallest upward force component accepted by [`attitude_setpoint`] [N].
pub const MIN_VERTICAL_FORCE: f64 = 1e-6;
/// Projection floor on the mass estimate [kg].
pub const MASS_FLOOR: f64 = 0.1;
/// Projection floor on each inertia estimate [kg m^2].
pub const INERTIA_FLOOR: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    /// Position sliding-surface slope [1/s].
    pub position_slope: Vector3<f64>,
    /// Attitude sliding-surface slope [1/s].
    pub attitude_slope: Vector3<f64>,
    pub position_gain: Vector3<f64>,
    /// Switching gain of the position loop; must dominate the force residual.
    pub position_switch: Vector3<f64>,
    pub attitude_gain: Vector3<f64>,
    /// Switching gain of the attitude loop; must dominate the torque residual.
    pub attitude_switch: Vector3<f64>,
    /// Position boundary-layer width [m/s].
    pub position_layer: f64,
    /// Attitude boundary-layer width [rad/s].
    pub attitude_layer: f64,
    pub mass_adaptation: f64,
    pub inertia_adaptation: Vector3<f64>,
    /// Time constant of the roll/pitch setpoint differentiator [s].
    pub setpoint_filter: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            position_slope: Vector3::repeat(2.5),
            attitude_slope: Vector3::repeat(2.5),
            position_gain: Vector3::repeat(4.0),
            position_switch: Vector3::repeat(1.5),
            attitude_gain: Vector3::repeat(0.3),
            attitude_switch: Vector3::repeat(0.08),
            position_layer: 0.25,
            attitude_layer: 0.4,
            mass_adaptation: 2.0,
            inertia_adaptation: Vector3::repeat(50.0),
            setpoint_filter: 0.02,
        }
    }
}

impl ControllerGains {
    /// Positivity of every gain plus the switching-gain condition against the
    /// residual force/torque bounds the loop must tolerate.
    pub fn validate(&self, force_residual: f64, torque_residual: f64) -> Result<()> {
        let vectors = [
            ("position_slope", self.position_slope),
            ("attitude_slope", self.attitude_slope),
            ("position_gain", self.position_gain),
            ("position_switch", self.position_switch),
            ("attitude_gain", self.attitude_gain),
            ("attitude_switch", self.attitude_switch),
            ("inertia_adaptation", self.inertia_adaptation),
        ];
        for (name, v) in vectors {
            if !v.iter().all(|x| *x > 0.0 && x.is_finite()) {
                return Err(Error::Config { path: format!("gains.{name}"), message: "entries must be positive".into() });
            }
        }
        let scalars = [
            ("position_layer", self.position_layer),
            ("attitude_layer", self.attitude_layer),
            ("mass_adaptation", self.mass_adaptation),
            ("setpoint_filter", self.setpoint_filter),
        ];
        for (name, x) in scalars {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Config { path: format!("gains.{name}"), message: "must be positive".into() });
            }
        }
        if self.position_switch.min() < force_residual {
            return Err(Error::Config {
                path: "gains.position_switch".into(),
                message: format!("{} below the force residual bound {force_residual} N", self.position_switch.min()),
            });
        }
        if self.attitude_switch.min() < torque_residual {
            return Err(Error::Config {
                path: "gains.attitude_switch".into(),
                message: format!("{} below the torque residual bound {torque_residual} N m", self.attitude_switch.min()),
            });
        }
        Ok(())
    }
}

/// Desired translational trajectory sample and heading.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Setpoint {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub yaw: f64,
    pub yaw_rate: f64,
}

impl Setpoint {
    pub fn hold(position: Vector3<f64>) -> Self {
        Self { position, ..Default::default() }
    }
}

/// Parameter estimates and the most recent loop internals.
#[derive(Clone, Debug, PartialEq)]
pub struct ControllerState {
    pub mass_estimate: f64,
    pub inertia_estimate: Vector3<f64>,
    pub position_surface: Vector3<f64>,
    pub attitude_surface: Vector3<f64>,
    pub position_delta: Vector3<f64>,
    pub attitude_delta: Vector3<f64>,
}

impl ControllerState {
    pub fn new(mass_estimate: f64, inertia_estimate: Vector3<f64>) -> Self {
        Self {
            mass_estimate,
            inertia_estimate,
            position_surface: Vector3::zeros(),
            attitude_surface: Vector3::zeros(),
            position_delta: Vector3::zeros(),
            attitude_delta: Vector3::zeros(),
        }
    }
}

/// Sliding surface `s = e' + L e` and reference rate `x_r' = x_d' - L e`.
pub fn sliding_surface(
    error: &Vector3<f64>,
    error_rate: &Vector3<f64>,
    slope: &Vector3<f64>,
    desired_rate: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    let correction = slope.component_mul(error);
    (error_rate + correction, desired_rate - correction)
}

/// Componentwise `sat(s / sigma)` and `D = s - sigma sat(s / sigma)`.
pub fn boundary_layer_delta(surface: &Vector3<f64>, layer: f64) -> (Vector3<f64>, Vector3<f64>) {
    let sat = surface.map(|s| (s / layer).clamp(-1.0, 1.0));
    let delta = surface.map(|s| if s.abs() <= layer { 0.0 } else { s - s.signum() * layer });
    (delta, sat)
}

/// Regressor with `Y b = B(zeta) zeta_r'' + C(zeta', zeta) zeta_r'` for any
/// principal inertia vector `b`.
pub fn regressor(
    zeta: &Vector3<f64>,
    zeta_dot: &Vector3<f64>,
    ref_rate: &Vector3<f64>,
    ref_accel: &Vector3<f64>,
) -> Result<Matrix3<f64>> {
    let mut y = Matrix3::zeros();
    for i in 0..3 {
        let (b, c) = b_and_c_matrices(zeta, zeta_dot, &Vector3::ith(i, 1.0))?;
        y.set_column(i, &(b * ref_accel + c * ref_rate));
    }
    Ok(y)
}

/// Result of the position loop at one tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionLoop {
    pub force: Vector3<f64>,
    pub surface: Vector3<f64>,
    pub delta: Vector3<f64>,
    pub sat: Vector3<f64>,
    /// `g + p_r''`, the mass regressor.
    pub mass_regressor: Vector3<f64>,
}

/// Desired total force of the position loop.
pub fn position_control(
    setpoint: &Setpoint,
    state: &RigidBodyState,
    ctrl: &ControllerState,
    gains: &ControllerGains,
    gravity: f64,
    force_estimate: &Vector3<f64>,
) -> PositionLoop {
    let error = state.position - setpoint.position;
    let error_rate = state.velocity - setpoint.velocity;
    let (surface, _) = sliding_surface(&error, &error_rate, &gains.position_slope, &setpoint.velocity);
    let ref_accel = setpoint.acceleration - gains.position_slope.component_mul(&error_rate);
    let (delta, sat) = boundary_layer_delta(&surface, gains.position_layer);
    let mass_regressor = Vector3::new(0.0, 0.0, gravity) + ref_accel;
    let force = ctrl.mass_estimate * mass_regressor
        - gains.position_gain.component_mul(&delta)
        - gains.position_switch.component_mul(&sat)
        - force_estimate;
    PositionLoop { force, surface, delta, sat, mass_regressor }
}

/// Roll, pitch and thrust magnitude that point body z along `force` at yaw `yaw`.
pub fn attitude_setpoint(force: &Vector3<f64>, yaw: f64) -> Result<(f64, f64, f64)> {
    if !(force.z > MIN_VERTICAL_FORCE) {
        return Err(Error::InfeasibleAttitude { fz: force.z });
    }
    let thrust = force.norm();
    let (s, c) = yaw.sin_cos();
    // Force expressed in the yaw-aligned frame.
    let fx = c * force.x + s * force.y;
    let fy = -s * force.x + c * force.y;
    let roll = (-fy / thrust).clamp(-1.0, 1.0).asin();
    let pitch = fx.atan2(force.z);
    Ok((roll, pitch, thrust))
}

/// Desired attitude with its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct AttitudeTarget {
    pub angles: Vector3<f64>,
    pub rates: Vector3<f64>,
    pub accels: Vector3<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttitudeLoop {
    /// Generalized torque in the Euler-angle dynamics.
    pub torque: Vector3<f64>,
    pub surface: Vector3<f64>,
    pub delta: Vector3<f64>,
    pub sat: Vector3<f64>,
    pub regressor: Matrix3<f64>,
    pub coriolis: Matrix3<f64>,
    pub ref_rate: Vector3<f64>,
    pub ref_accel: Vector3<f64>,
}

/// Euler torque of the attitude loop; `torque_estimate` is already in Euler form.
pub fn attitude_control(
    target: &AttitudeTarget,
    state: &RigidBodyState,
    ctrl: &ControllerState,
    gains: &ControllerGains,
    torque_estimate: &Vector3<f64>,
) -> Result<AttitudeLoop> {
    let zeta = &state.attitude;
    let zeta_dot = &state.attitude_rate;
    let mut error = zeta - target.angles;
    error.z = wrap_angle(error.z);
    let error_rate = zeta_dot - target.rates;
    let (surface, ref_rate) = sliding_surface(&error, &error_rate, &gains.attitude_slope, &target.rates);
    let ref_accel = target.accels - gains.attitude_slope.component_mul(&error_rate);
    let (delta, sat) = boundary_layer_delta(&surface, gains.attitude_layer);
    let y = regressor(zeta, zeta_dot, &ref_rate, &ref_accel)?;
    let (_, c) = b_and_c_matrices(zeta, zeta_dot, &ctrl.inertia_estimate)?;
    let switching = Matrix3::from_diagonal(&gains.attitude_switch) - gains.attitude_layer * c;
    let torque = y * ctrl.inertia_estimate
        - gains.attitude_gain.component_mul(&delta)
        - switching * sat
        - torque_estimate;
    Ok(AttitudeLoop { torque, surface, delta, sat, regressor: y, coriolis: c, ref_rate, ref_accel })
}

/// Forward-Euler step of the adaptation laws with projection floors.
pub fn adaptive_update(
    ctrl: &ControllerState,
    gains: &ControllerGains,
    position_delta: &Vector3<f64>,
    attitude_delta: &Vector3<f64>,
    mass_regressor: &Vector3<f64>,
    regressor: &Matrix3<f64>,
    dt: f64,
) -> ControllerState {
    let mass_rate = -mass_regressor.dot(position_delta) / gains.mass_adaptation;
    let inertia_rate = -(regressor.transpose() * attitude_delta).component_div(&gains.inertia_adaptation);
    ControllerState {
        mass_estimate: (ctrl.mass_estimate + dt * mass_rate).max(MASS_FLOOR),
        inertia_estimate: (ctrl.inertia_estimate + dt * inertia_rate).map(|b| b.max(INERTIA_FLOOR)),
        ..ctrl.clone()
    }
}

/// Ground-truth quantities for evaluating the Lyapunov function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovTruth {
    pub mass: f64,
    pub inertia: Vector3<f64>,
    /// `B(zeta)` built from the true inertia.
    pub inertia_matrix: Matrix3<f64>,
    /// `f_d - f_hat` in the inertial frame.
    pub force_residual: Vector3<f64>,
    /// `tau_d - tau_hat` in Euler-torque form.
    pub torque_residual: Vector3<f64>,
}

/// Lyapunov value and its derivative along the closed loop.
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_eval(
    ctrl: &ControllerState,
    gains: &ControllerGains,
    position_delta: &Vector3<f64>,
    position_sat: &Vector3<f64>,
    attitude_delta: &Vector3<f64>,
    attitude_sat: &Vector3<f64>,
    truth: &LyapunovTruth,
) -> (f64, f64) {
    let mass_err = truth.mass - ctrl.mass_estimate;
    let inertia_err = truth.inertia - ctrl.inertia_estimate;
    let value = 0.5 * truth.mass * position_delta.norm_squared()
        + 0.5 * gains.mass_adaptation * mass_err * mass_err
        + 0.5 * attitude_delta.dot(&(truth.inertia_matrix * attitude_delta))
        + 0.5 * inertia_err.dot(&gains.inertia_adaptation.component_mul(&inertia_err));
    let d1 = position_delta;
    let d2 = attitude_delta;
    let rate = -d1.dot(&gains.position_gain.component_mul(d1))
        - d1.dot(&gains.position_switch.component_mul(position_sat))
        + d1.dot(&truth.force_residual)
        - d2.dot(&gains.attitude_gain.component_mul(d2))
        - d2.dot(&gains.attitude_switch.component_mul(attitude_sat))
        + d2.dot(&truth.torque_residual);
    (value, rate)
}

/// First-order filtered finite-difference differentiator.
#[derive(Clone, Debug, PartialEq)]
struct FilteredDerivative {
    time_constant: f64,
    previous: Option<Vector3<f64>>,
    output: Vector3<f64>,
}

impl FilteredDerivative {
    fn new(time_constant: f64) -> Self {
        Self { time_constant, previous: None, output: Vector3::zeros() }
    }

    fn update(&mut self, input: &Vector3<f64>, dt: f64) -> Vector3<f64> {
        if let Some(prev) = self.previous {
            let raw = (input - prev) / dt;
            let blend = dt / (self.time_constant + dt);
            self.output += blend * (raw - self.output);
        }
        self.previous = Some(*input);
        self.output
    }
}

/// Everything the cascade computed at one tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlOutput {
    pub thrust: f64,
    /// Desired force of the position loop (inertial frame).
    pub force: Vector3<f64>,
    /// Euler torque of the attitude loop.
    pub torque: Vector3<f64>,
    pub torque_body: Vector3<f64>,
    pub target: AttitudeTarget,
    pub position: PositionLoop,
    pub attitude: AttitudeLoop,
    /// Estimates used for this tick's control (before adaptation).
    pub mass_estimate: f64,
    pub inertia_estimate: Vector3<f64>,
}

/// Position and attitude loops, setpoint differentiation and adaptation.
#[derive(Clone, Debug)]
pub struct CascadeController {
    pub gains: ControllerGains,
    pub state: ControllerState,
    /// Use the observer estimates as feedforward.
    pub feedforward: bool,
    gravity: f64,
    angle_rate: FilteredDerivative,
    angle_accel: FilteredDerivative,
}

impl CascadeController {
    pub fn new(gains: ControllerGains, initial: ControllerState, gravity: f64, feedforward: bool) -> Self {
        let tc = gains.setpoint_filter;
        Self {
            gains,
            state: initial,
            feedforward,
            gravity,
            angle_rate: FilteredDerivative::new(tc),
            angle_accel: FilteredDerivative::new(tc),
        }
    }

    /// Runs both loops, then adapts the estimates for the next tick.
    pub fn update(
        &mut self,
        setpoint: &Setpoint,
        state: &RigidBodyState,
        force_estimate: &Vector3<f64>,
        torque_estimate_body: &Vector3<f64>,
        dt: f64,
    ) -> Result<ControlOutput> {
        let (f_hat, tau_hat_b) = if self.feedforward {
            (*force_estimate, *torque_estimate_body)
        } else {
            (Vector3::zeros(), Vector3::zeros())
        };
        let position = position_control(setpoint, state, &self.state, &self.gains, self.gravity, &f_hat);
        let (roll, pitch, thrust) = attitude_setpoint(&position.force, setpoint.yaw)?;

        let angles = Vector3::new(roll, pitch, setpoint.yaw);
        let mut rates = self.angle_rate.update(&Vector3::new(roll, pitch, 0.0), dt);
        let mut accels = self.angle_accel.update(&rates, dt);
        rates.z = setpoint.yaw_rate;
        accels.z = 0.0;
        let target = AttitudeTarget { angles, rates, accels };

        let tau_hat = euler_rate_matrix(&state.attitude)?.transpose() * tau_hat_b;
        let attitude = attitude_control(&target, state, &self.state, &self.gains, &tau_hat)?;
        let torque_body = euler_to_body_torque(&state.attitude, &attitude.torque)?;

        let output = ControlOutput {
            thrust,
            force: position.force,
            torque: attitude.torque,
            torque_body,
            target,
            position,
            attitude,
            mass_estimate: self.state.mass_estimate,
            inertia_estimate: self.state.inertia_estimate,
        };

        let mut next = adaptive_update(
            &self.state,
            &self.gains,
            &position.delta,
            &attitude.delta,
            &position.mass_regressor,
            &attitude.regressor,
            dt,
        );
        next.position_surface = position.surface;
        next.attitude_surface = attitude.surface;
        next.position_delta = position.delta;
        next.attitude_delta = attitude.delta;
        self.state = next;
        Ok(output)
    }
}
