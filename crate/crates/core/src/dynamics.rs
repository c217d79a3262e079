//! Rigid-body plant in Euler-angle form, rotor mixing and synthetic disturbances.
//!
//! Translational motion follows `m p'' + m g = f + f_d` with `g` the upward
//! gravity vector `(0, 0, g)`, so hover thrust is `+m g` along world z.
//! Rotational motion uses Z-Y-X Euler angles `zeta = (phi, theta, psi)`:
//!
//! ```text
//! B(zeta) zeta'' + C(zeta', zeta) zeta' = tau + tau_d
//! B = T^T J T,  C = T^T J T' - T^T S(J T zeta') T,  omega = T zeta'
//! ```
//!
//! `C` is the factorization for which `B' - 2C` is skew-symmetric; it gives
//! the same `C zeta'` product as the body-frame gyroscopic term.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::math::{all_finite, rotation_zyx, skew};
use crate::morphology::{tip_to_tip_length, MorphGeometry};

/// Distance from ±π/2 pitch at which the Euler parametrization is rejected.
pub const PITCH_GUARD: f64 = 1e-3;

/// Position, velocity, Euler attitude and Euler rates.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RigidBodyState {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: Vector3<f64>,
    pub attitude_rate: Vector3<f64>,
}

impl RigidBodyState {
    pub fn at_rest(position: Vector3<f64>) -> Self {
        Self { position, ..Default::default() }
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.position)
            && all_finite(&self.velocity)
            && all_finite(&self.attitude)
            && all_finite(&self.attitude_rate)
    }

    /// Body angular velocity `omega = T zeta'`.
    pub fn body_rate(&self) -> Result<Vector3<f64>> {
        Ok(euler_rate_matrix(&self.attitude)? * self.attitude_rate)
    }
}

/// Mass properties and rotor constants of the plant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    pub mass: f64,
    /// Gravity magnitude, acting along -z.
    pub gravity: f64,
    pub inertia: Vector3<f64>,
    /// Thrust per squared rotor speed [N s^2].
    pub thrust_coeff: f64,
    /// Drag torque per squared rotor speed [N m s^2].
    pub drag_coeff: f64,
    /// Rotor speed limit [rad/s].
    pub max_rotor_speed: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            mass: 0.805,
            gravity: 9.81,
            inertia: Vector3::new(5e-3, 5e-3, 9e-3),
            thrust_coeff: 8.0e-6,
            drag_coeff: 1.2e-7,
            max_rotor_speed: 1200.0,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::Domain(format!("plant mass must be positive, got {}", self.mass)));
        }
        if !self.inertia.iter().all(|j| *j > 0.0) {
            return Err(Error::Domain(format!("plant inertia must be positive, got {:?}", self.inertia)));
        }
        if !(self.thrust_coeff > 0.0 && self.drag_coeff > 0.0 && self.max_rotor_speed > 0.0) {
            return Err(Error::Domain("rotor coefficients must be positive".into()));
        }
        Ok(())
    }

    pub fn gravity_vector(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, self.gravity)
    }

    /// Largest thrust a single rotor can produce.
    pub fn max_rotor_thrust(&self) -> f64 {
        self.thrust_coeff * self.max_rotor_speed * self.max_rotor_speed
    }
}

/// External force (inertial frame) and torque (body frame).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DisturbanceSample {
    pub force: Vector3<f64>,
    pub torque_body: Vector3<f64>,
}

fn check_pitch(zeta: &Vector3<f64>) -> Result<()> {
    if !zeta.y.is_finite() || zeta.y.abs() >= FRAC_PI_2 - PITCH_GUARD {
        return Err(Error::Singularity { theta: zeta.y.abs() });
    }
    Ok(())
}

/// Map `T` with `omega = T zeta'` for Z-Y-X Euler angles.
pub fn euler_rate_matrix(zeta: &Vector3<f64>) -> Result<Matrix3<f64>> {
    check_pitch(zeta)?;
    let (sphi, cphi) = zeta.x.sin_cos();
    let (sth, cth) = zeta.y.sin_cos();
    Ok(Matrix3::new(1.0, 0.0, -sth, 0.0, cphi, sphi * cth, 0.0, -sphi, cphi * cth))
}

/// Time derivative of [`euler_rate_matrix`] along `zeta'`.
pub fn euler_rate_matrix_dot(zeta: &Vector3<f64>, zeta_dot: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = zeta.x.sin_cos();
    let (sth, cth) = zeta.y.sin_cos();
    let (dphi, dth) = (zeta_dot.x, zeta_dot.y);
    Matrix3::new(
        0.0,
        0.0,
        -cth * dth,
        0.0,
        -sphi * dphi,
        cphi * cth * dphi - sphi * sth * dth,
        0.0,
        -cphi * dphi,
        -sphi * cth * dphi - cphi * sth * dth,
    )
}

/// Inertia matrix `B` and Coriolis matrix `C` of the Euler-angle dynamics.
pub fn b_and_c_matrices(
    zeta: &Vector3<f64>,
    zeta_dot: &Vector3<f64>,
    inertia: &Vector3<f64>,
) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    let t = euler_rate_matrix(zeta)?;
    let t_dot = euler_rate_matrix_dot(zeta, zeta_dot);
    let j = Matrix3::from_diagonal(inertia);
    let momentum = j * (t * zeta_dot);
    let b = t.transpose() * j * t;
    let c = t.transpose() * j * t_dot - t.transpose() * skew(&momentum) * t;
    Ok((b, c))
}

/// Generalized (Euler) torque equivalent to a body-frame torque: `T^T tau_b`.
pub fn body_to_euler_torque(zeta: &Vector3<f64>, torque_body: &Vector3<f64>) -> Result<Vector3<f64>> {
    Ok(euler_rate_matrix(zeta)?.transpose() * torque_body)
}

/// Body-frame torque equivalent to an Euler torque: `T^-T tau`.
pub fn euler_to_body_torque(zeta: &Vector3<f64>, torque: &Vector3<f64>) -> Result<Vector3<f64>> {
    let t = euler_rate_matrix(zeta)?;
    t.transpose()
        .lu()
        .solve(torque)
        .ok_or(Error::Singularity { theta: zeta.y.abs() })
}

/// Control input held constant over one integration step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Actuation {
    /// World-frame force and Euler torque, independent of the attitude.
    Inertial { force: Vector3<f64>, torque: Vector3<f64> },
    /// Collective thrust along body z and body-frame torque; the world-frame
    /// force rotates with the vehicle inside the step.
    Body { thrust: f64, torque: Vector3<f64> },
}

#[derive(Clone, Copy)]
struct Derivative {
    velocity: Vector3<f64>,
    acceleration: Vector3<f64>,
    attitude_rate: Vector3<f64>,
    attitude_accel: Vector3<f64>,
}

fn derivative(
    state: &RigidBodyState,
    params: &PlantParams,
    input: &Actuation,
    disturbance: &DisturbanceSample,
) -> Result<Derivative> {
    let zeta = &state.attitude;
    let (force, torque) = match input {
        Actuation::Inertial { force, torque } => (*force, *torque),
        Actuation::Body { thrust, torque } => (
            rotation_zyx(zeta) * Vector3::new(0.0, 0.0, *thrust),
            body_to_euler_torque(zeta, torque)?,
        ),
    };
    let acceleration = (force + disturbance.force) / params.mass - params.gravity_vector();
    let (b, c) = b_and_c_matrices(zeta, &state.attitude_rate, &params.inertia)?;
    let rhs = torque + body_to_euler_torque(zeta, &disturbance.torque_body)? - c * state.attitude_rate;
    let attitude_accel = b
        .cholesky()
        .ok_or(Error::Singularity { theta: zeta.y.abs() })?
        .solve(&rhs);
    Ok(Derivative {
        velocity: state.velocity,
        acceleration,
        attitude_rate: state.attitude_rate,
        attitude_accel,
    })
}

fn advance(state: &RigidBodyState, d: &Derivative, h: f64) -> RigidBodyState {
    RigidBodyState {
        position: state.position + d.velocity * h,
        velocity: state.velocity + d.acceleration * h,
        attitude: state.attitude + d.attitude_rate * h,
        attitude_rate: state.attitude_rate + d.attitude_accel * h,
    }
}

/// One classical RK4 step of the coupled translational/Euler-angle dynamics.
pub fn step(
    state: &RigidBodyState,
    params: &PlantParams,
    input: &Actuation,
    disturbance: &DisturbanceSample,
    dt: f64,
) -> Result<RigidBodyState> {
    if !(dt > 0.0 && dt <= 0.01) {
        return Err(Error::Domain(format!("integration step {dt} s outside (0, 0.01]")));
    }
    if !state.is_finite() {
        return Err(Error::NonFinite("plant state"));
    }
    let k1 = derivative(state, params, input, disturbance)?;
    let k2 = derivative(&advance(state, &k1, 0.5 * dt), params, input, disturbance)?;
    let k3 = derivative(&advance(state, &k2, 0.5 * dt), params, input, disturbance)?;
    let k4 = derivative(&advance(state, &k3, dt), params, input, disturbance)?;
    let w = dt / 6.0;
    let next = RigidBodyState {
        position: state.position + w * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity),
        velocity: state.velocity
            + w * (k1.acceleration + 2.0 * k2.acceleration + 2.0 * k3.acceleration + k4.acceleration),
        attitude: state.attitude
            + w * (k1.attitude_rate + 2.0 * k2.attitude_rate + 2.0 * k3.attitude_rate + k4.attitude_rate),
        attitude_rate: state.attitude_rate
            + w * (k1.attitude_accel + 2.0 * k2.attitude_accel + 2.0 * k3.attitude_accel + k4.attitude_accel),
    };
    if !next.is_finite() {
        return Err(Error::NonFinite("plant state after step"));
    }
    check_pitch(&next.attitude)?;
    Ok(next)
}

/// [`step`] with a world-frame force and Euler torque.
pub fn step_dynamics(
    state: &RigidBodyState,
    params: &PlantParams,
    force: &Vector3<f64>,
    torque: &Vector3<f64>,
    disturbance: &DisturbanceSample,
    dt: f64,
) -> Result<RigidBodyState> {
    step(state, params, &Actuation::Inertial { force: *force, torque: *torque }, disturbance, dt)
}

/// Attitude state integrated directly in body-rate form,
/// `J omega' + omega x J omega = tau_b + tau_d_b`, `zeta' = T^-1 omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyRateState {
    pub attitude: Vector3<f64>,
    pub body_rate: Vector3<f64>,
}

/// RK4 step of the body-rate rotational dynamics.
pub fn step_body_rates(
    state: &BodyRateState,
    inertia: &Vector3<f64>,
    torque_body: &Vector3<f64>,
    dt: f64,
) -> Result<BodyRateState> {
    let f = |s: &BodyRateState| -> Result<(Vector3<f64>, Vector3<f64>)> {
        let t = euler_rate_matrix(&s.attitude)?;
        let zeta_dot = t.lu().solve(&s.body_rate).ok_or(Error::Singularity { theta: s.attitude.y.abs() })?;
        let jw = inertia.component_mul(&s.body_rate);
        let omega_dot = (torque_body - s.body_rate.cross(&jw)).component_div(inertia);
        Ok((zeta_dot, omega_dot))
    };
    let add = |s: &BodyRateState, k: &(Vector3<f64>, Vector3<f64>), h: f64| BodyRateState {
        attitude: s.attitude + k.0 * h,
        body_rate: s.body_rate + k.1 * h,
    };
    let k1 = f(state)?;
    let k2 = f(&add(state, &k1, 0.5 * dt))?;
    let k3 = f(&add(state, &k2, 0.5 * dt))?;
    let k4 = f(&add(state, &k3, dt))?;
    Ok(BodyRateState {
        attitude: state.attitude + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        body_rate: state.body_rate + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    })
}

/// Spin direction of each rotor; diagonal pairs turn the same way.
pub const ROTOR_SPIN: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// Map from the four rotor thrusts to `(f_z, tau_x, tau_y, tau_z)` in the body frame.
///
/// Rotor `i` sits on arm `i` (headings 45°, 135°, 225°, 315°); its lever arm
/// about each horizontal axis is `radius / sqrt(2)`.
pub fn allocation_matrix(alpha: f64, geom: &MorphGeometry, params: &PlantParams) -> Result<Matrix4<f64>> {
    tip_to_tip_length(alpha, geom)?;
    let radius = geom.rotor_radius_at(alpha);
    let yaw = params.drag_coeff / params.thrust_coeff;
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        let heading = FRAC_PI_4 + FRAC_PI_2 * i as f64;
        let (x, y) = (radius * heading.cos(), radius * heading.sin());
        m[(0, i)] = 1.0;
        m[(1, i)] = y;
        m[(2, i)] = -x;
        m[(3, i)] = ROTOR_SPIN[i] * yaw;
    }
    Ok(m)
}

/// Mixer at one fold angle: the allocation matrix and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixer {
    pub allocation: Matrix4<f64>,
    pub inverse: Matrix4<f64>,
}

impl Mixer {
    pub fn new(alpha: f64, geom: &MorphGeometry, params: &PlantParams) -> Result<Self> {
        let allocation = allocation_matrix(alpha, geom, params)?;
        let inverse = allocation
            .try_inverse()
            .ok_or_else(|| Error::Domain(format!("allocation matrix singular at fold {alpha}")))?;
        Ok(Self { allocation, inverse })
    }

    /// Rotor thrusts realizing a collective thrust and body torque.
    pub fn thrusts(&self, thrust: f64, torque_body: &Vector3<f64>) -> Vector4<f64> {
        self.inverse * Vector4::new(thrust, torque_body.x, torque_body.y, torque_body.z)
    }

    /// Collective thrust and body torque produced by rotor thrusts.
    pub fn wrench(&self, thrusts: &Vector4<f64>) -> (f64, Vector3<f64>) {
        let w = self.allocation * thrusts;
        (w[0], Vector3::new(w[1], w[2], w[3]))
    }
}

/// Clamps each rotor thrust to `[0, max_thrust]`; the flag reports any clamp.
pub fn apply_rotor_limits(thrusts: &Vector4<f64>, max_thrust: f64) -> (Vector4<f64>, bool) {
    let clamped = thrusts.map(|t| t.clamp(0.0, max_thrust));
    let saturated = clamped != *thrusts;
    (clamped, saturated)
}

/// Parameters of the synthetic disturbance process.
///
/// Each channel is `scale(alpha) * (bias + n(t))` with `n` an Ornstein-Uhlenbeck
/// process, then clamped componentwise to the bounds. `scale` grows as the
/// frame contracts: `1 + fold_gain * (L(0) / L(alpha) - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceParams {
    pub force_bias: Vector3<f64>,
    pub torque_bias: Vector3<f64>,
    /// Stationary standard deviation of the force noise [N].
    pub force_noise: f64,
    /// Stationary standard deviation of the torque noise [N m].
    pub torque_noise: f64,
    /// Noise correlation time [s].
    pub correlation_time: f64,
    pub fold_gain: f64,
    pub force_bound: f64,
    pub torque_bound: f64,
}

impl Default for DisturbanceParams {
    fn default() -> Self {
        Self {
            force_bias: Vector3::new(0.12, -0.08, 0.04),
            torque_bias: Vector3::new(2e-3, -1.5e-3, 1e-3),
            force_noise: 0.05,
            torque_noise: 1e-3,
            correlation_time: 0.5,
            fold_gain: 4.0,
            force_bound: 1.0,
            torque_bound: 0.05,
        }
    }
}

impl DisturbanceParams {
    /// No disturbance at all; bounds keep their defaults.
    pub fn quiet() -> Self {
        Self {
            force_bias: Vector3::zeros(),
            torque_bias: Vector3::zeros(),
            force_noise: 0.0,
            torque_noise: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.force_bound > 0.0 && self.torque_bound > 0.0) {
            return Err(Error::Domain("disturbance bounds must be positive".into()));
        }
        if !(self.force_noise >= 0.0 && self.torque_noise >= 0.0) {
            return Err(Error::Domain("disturbance noise levels must be non-negative".into()));
        }
        if !(self.correlation_time > 0.0) {
            return Err(Error::Domain("disturbance correlation time must be positive".into()));
        }
        if !(self.fold_gain >= 0.0) {
            return Err(Error::Domain("disturbance fold gain must be non-negative".into()));
        }
        Ok(())
    }
}

/// Seeded generator of bounded, fold-dependent disturbances.
#[derive(Clone, Debug)]
pub struct DisturbanceModel {
    params: DisturbanceParams,
    geom: MorphGeometry,
    rng: ChaCha8Rng,
    force_noise: Vector3<f64>,
    torque_noise: Vector3<f64>,
}

impl DisturbanceModel {
    pub fn new(params: DisturbanceParams, geom: MorphGeometry, seed: u64) -> Self {
        Self {
            params,
            geom,
            rng: ChaCha8Rng::seed_from_u64(seed),
            force_noise: Vector3::zeros(),
            torque_noise: Vector3::zeros(),
        }
    }

    pub fn params(&self) -> &DisturbanceParams {
        &self.params
    }

    /// Amplification of the disturbance at fold angle `alpha`.
    pub fn scale(&self, alpha: f64) -> Result<f64> {
        let ratio = tip_to_tip_length(0.0, &self.geom)? / tip_to_tip_length(alpha, &self.geom)?;
        Ok(1.0 + self.params.fold_gain * (ratio - 1.0))
    }

    fn gaussian(&mut self) -> Vector3<f64> {
        let n = &mut self.rng;
        Vector3::new(
            StandardNormal.sample(&mut *n),
            StandardNormal.sample(&mut *n),
            StandardNormal.sample(&mut *n),
        )
    }

    /// Advances the noise by `dt` and returns the disturbance at fold `alpha`.
    pub fn sample(&mut self, alpha: f64, dt: f64) -> Result<DisturbanceSample> {
        let scale = self.scale(alpha)?;
        let decay = (-dt / self.params.correlation_time).exp();
        let spread = (1.0 - decay * decay).sqrt();
        let (gf, gt) = (self.gaussian(), self.gaussian());
        self.force_noise = self.force_noise * decay + gf * (self.params.force_noise * spread);
        self.torque_noise = self.torque_noise * decay + gt * (self.params.torque_noise * spread);
        let fb = self.params.force_bound;
        let tb = self.params.torque_bound;
        Ok(DisturbanceSample {
            force: ((self.params.force_bias + self.force_noise) * scale).map(|x| x.clamp(-fb, fb)),
            torque_body: ((self.params.torque_bias + self.torque_noise) * scale).map(|x| x.clamp(-tb, tb)),
        })
    }
}

/// Kinetic plus potential energy of the translational and rotational motion.
pub fn mechanical_energy(state: &RigidBodyState, params: &PlantParams) -> Result<f64> {
    let omega = state.body_rate()?;
    Ok(0.5 * params.mass * state.velocity.norm_squared()
        + 0.5 * omega.dot(&params.inertia.component_mul(&omega))
        + params.mass * params.gravity * state.position.z)
}
