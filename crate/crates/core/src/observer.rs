//! Momentum-based disturbance observer.
//!
//! ```text
//! f_hat   = K_f (m v      - ∫ (f_c - m g + f_hat) dt)
//! tau_hat = K_t (J omega  - ∫ (tau_c - omega x J omega + tau_hat) dt)
//! ```
//!
//! With exact models each estimate is the true disturbance passed through a
//! first-order low-pass filter with bandwidth `K`. The force channel lives in
//! the inertial frame, the torque channel in the body frame.
//!
//! Discretization: the command is held over each interval so its integral is
//! exact; the estimate and gyroscopic terms use the trapezoidal rule, which
//! makes the estimate a Tustin-discretized first-order filter. The implicit
//! trapezoid in the estimate is solved in closed form per axis.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::body_to_euler_torque;
use crate::error::{Error, Result};
use crate::math::all_finite;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObserverGains {
    /// Force channel bandwidths [1/s].
    pub force: Vector3<f64>,
    /// Torque channel bandwidths [1/s].
    pub torque: Vector3<f64>,
}

impl Default for ObserverGains {
    fn default() -> Self {
        Self { force: Vector3::repeat(8.0), torque: Vector3::repeat(8.0) }
    }
}

impl ObserverGains {
    pub fn validate(&self) -> Result<()> {
        if self.force.iter().chain(self.torque.iter()).all(|k| *k > 0.0 && k.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain("observer gains must be strictly positive".into()))
        }
    }
}

/// Velocity and body rate sampled at a control tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub velocity: Vector3<f64>,
    pub body_rate: Vector3<f64>,
}

/// Force (inertial) and body torque that were applied over the last interval.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct AppliedWrench {
    pub force: Vector3<f64>,
    pub torque_body: Vector3<f64>,
}

/// Model quantities the observer is told about.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObserverModel {
    pub mass: f64,
    pub inertia: Vector3<f64>,
    pub gravity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObserverState {
    pub force_estimate: Vector3<f64>,
    pub torque_estimate_body: Vector3<f64>,
    pub force_integral: Vector3<f64>,
    pub torque_integral: Vector3<f64>,
    gyro: Vector3<f64>,
    /// Estimates are clamped to these magnitudes per axis.
    limits: (f64, f64),
}

fn gyroscopic(inertia: &Vector3<f64>, rate: &Vector3<f64>) -> Vector3<f64> {
    rate.cross(&inertia.component_mul(rate))
}

fn check(meas: &Measurement, model: &ObserverModel) -> Result<()> {
    if !all_finite(&meas.velocity) || !all_finite(&meas.body_rate) {
        return Err(Error::NonFinite("observer measurement"));
    }
    if !(model.mass.is_finite() && all_finite(&model.inertia)) {
        return Err(Error::NonFinite("observer model"));
    }
    Ok(())
}

impl ObserverState {
    /// Zero estimates, with integrals seeded from the current momenta.
    ///
    /// `limits` are the disturbance bounds; estimates are kept within twice them.
    pub fn new(meas: &Measurement, model: &ObserverModel, limits: (f64, f64)) -> Result<Self> {
        check(meas, model)?;
        Ok(Self {
            force_estimate: Vector3::zeros(),
            torque_estimate_body: Vector3::zeros(),
            force_integral: model.mass * meas.velocity,
            torque_integral: model.inertia.component_mul(&meas.body_rate),
            gyro: gyroscopic(&model.inertia, &meas.body_rate),
            limits,
        })
    }

    /// Advances the observer by `dt` given the new measurement and the wrench
    /// commanded over the elapsed interval.
    pub fn update(
        &self,
        gains: &ObserverGains,
        meas: &Measurement,
        model: &ObserverModel,
        applied: &AppliedWrench,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("observer step must be positive, got {dt}")));
        }
        check(meas, model)?;
        if !all_finite(&applied.force) || !all_finite(&applied.torque_body) {
            return Err(Error::NonFinite("observer command"));
        }
        let half = 0.5 * dt;
        let weight = Vector3::new(0.0, 0.0, model.mass * model.gravity);

        let momentum = model.mass * meas.velocity;
        let mut force_integral = Vector3::zeros();
        let mut force_estimate = Vector3::zeros();
        for i in 0..3 {
            let k = gains.force[i];
            let partial = self.force_integral[i]
                + (applied.force[i] - weight[i]) * dt
                + half * self.force_estimate[i];
            force_integral[i] = (partial + half * k * momentum[i]) / (1.0 + half * k);
            force_estimate[i] = k * (momentum[i] - force_integral[i]);
        }

        let angular = model.inertia.component_mul(&meas.body_rate);
        let gyro = gyroscopic(&model.inertia, &meas.body_rate);
        let mut torque_integral = Vector3::zeros();
        let mut torque_estimate = Vector3::zeros();
        for i in 0..3 {
            let k = gains.torque[i];
            let partial = self.torque_integral[i] + applied.torque_body[i] * dt
                - half * (self.gyro[i] + gyro[i])
                + half * self.torque_estimate_body[i];
            torque_integral[i] = (partial + half * k * angular[i]) / (1.0 + half * k);
            torque_estimate[i] = k * (angular[i] - torque_integral[i]);
        }

        let mut next = Self {
            force_estimate,
            torque_estimate_body: torque_estimate,
            force_integral,
            torque_integral,
            gyro,
            limits: self.limits,
        };
        next.clamp(gains, &momentum, &angular);
        Ok(next)
    }

    // Keeps the integrals consistent with the clamped estimates.
    fn clamp(&mut self, gains: &ObserverGains, momentum: &Vector3<f64>, angular: &Vector3<f64>) {
        let (fl, tl) = (2.0 * self.limits.0, 2.0 * self.limits.1);
        for i in 0..3 {
            if self.force_estimate[i].abs() > fl {
                self.force_estimate[i] = self.force_estimate[i].clamp(-fl, fl);
                self.force_integral[i] = momentum[i] - self.force_estimate[i] / gains.force[i];
            }
            if self.torque_estimate_body[i].abs() > tl {
                self.torque_estimate_body[i] = self.torque_estimate_body[i].clamp(-tl, tl);
                self.torque_integral[i] = angular[i] - self.torque_estimate_body[i] / gains.torque[i];
            }
        }
    }
}

/// Torque estimate mapped into the Euler-angle dynamics, `T^T tau_hat_b`.
pub fn torque_estimate_to_inertial(torque_body: &Vector3<f64>, zeta: &Vector3<f64>) -> Result<Vector3<f64>> {
    body_to_euler_torque(zeta, torque_body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        euler_rate_matrix, step, step_body_rates, Actuation, BodyRateState, DisturbanceSample, PlantParams, RigidBodyState,
    };
    use approx::assert_relative_eq;

    fn model(p: &PlantParams) -> ObserverModel {
        ObserverModel { mass: p.mass, inertia: p.inertia, gravity: p.gravity }
    }

    /// Closed loop of an observer on an open-loop hovering plant with a
    /// prescribed disturbance; returns the estimate history at each tick.
    fn run(
        disturbance: impl Fn(f64) -> DisturbanceSample,
        gains: &ObserverGains,
        duration: f64,
    ) -> Vec<(f64, DisturbanceSample, Vector3<f64>, Vector3<f64>)> {
        let p = PlantParams { inertia: Vector3::new(4e-3, 4e-3, 7e-3), ..Default::default() };
        let dt_plant = 1e-3;
        let mut s = RigidBodyState::at_rest(Vector3::new(0.0, 0.0, 1.0));
        let meas = |s: &RigidBodyState| Measurement { velocity: s.velocity, body_rate: s.body_rate().unwrap() };
        let mut obs = ObserverState::new(&meas(&s), &model(&p), (10.0, 1.0)).unwrap();
        let hover = p.mass * p.gravity;
        let input = Actuation::Body { thrust: hover, torque: Vector3::zeros() };
        let mut out = Vec::new();
        let steps = (duration / 2e-3).round() as usize;
        for k in 0..steps {
            let t0 = k as f64 * 2e-3;
            for sub in 0..2 {
                let d = disturbance(t0 + sub as f64 * dt_plant);
                s = step(&s, &p, &input, &d, dt_plant).unwrap();
            }
            let applied = AppliedWrench {
                force: crate::math::rotation_zyx(&s.attitude) * Vector3::new(0.0, 0.0, hover),
                torque_body: Vector3::zeros(),
            };
            obs = obs.update(gains, &meas(&s), &model(&p), &applied, 2e-3).unwrap();
            let t = t0 + 2e-3;
            out.push((t, disturbance(t), obs.force_estimate, obs.torque_estimate_body));
        }
        out
    }

    #[test]
    fn silent_at_exact_hover() {
        let hist = run(|_| DisturbanceSample::default(), &ObserverGains::default(), 1.0);
        for (_, _, f, tau) in hist {
            assert!(f.norm() < 1e-10 && tau.norm() < 1e-10);
        }
    }

    #[test]
    fn step_response_is_first_order() {
        let d0 = 0.4;
        let step_in = |_| DisturbanceSample { force: Vector3::new(0.0, d0, 0.0), torque_body: Vector3::zeros() };
        let hist = run(step_in, &ObserverGains::default(), 0.5);
        let at = hist.iter().find(|(t, ..)| *t >= 3.0 / 8.0).unwrap();
        let err = (d0 - at.2.y).abs() / d0;
        assert!(err < 0.051, "error {err}");
        for (t, _, f, _) in &hist {
            let analytic = d0 * (1.0 - (-8.0 * t).exp());
            assert!((f.y - analytic).abs() < 0.01 * d0, "t={t} f={} analytic={analytic}", f.y);
        }
    }

    #[test]
    fn torque_step_response() {
        let step_in = |_| DisturbanceSample { force: Vector3::zeros(), torque_body: Vector3::new(0.0, 0.0, 2e-3) };
        let hist = run(step_in, &ObserverGains::default(), 0.6);
        for (t, _, _, tau) in &hist {
            let analytic = 2e-3 * (1.0 - (-8.0 * t).exp());
            assert!((tau.z - analytic).abs() < 0.02 * 2e-3, "t={t}");
        }
    }

    #[test]
    fn sinusoid_amplitude_ratio() {
        let w0 = 6.0;
        let amp = 0.3;
        let input = move |t: f64| DisturbanceSample {
            force: Vector3::new(amp * (w0 * t).sin(), 0.0, 0.0),
            torque_body: Vector3::zeros(),
        };
        let hist = run(input, &ObserverGains::default(), 6.0);
        let peak = hist.iter().filter(|(t, ..)| *t > 3.0).map(|h| h.2.x.abs()).fold(0.0, f64::max);
        let expected = 8.0 / (64.0f64 + w0 * w0).sqrt();
        assert!((peak / amp - expected).abs() / expected < 0.02, "ratio {}", peak / amp);
    }

    #[test]
    fn bias_free_at_equilibrium() {
        let d = Vector3::new(0.3, -0.2, 0.1);
        let hist = run(|_| DisturbanceSample { force: d, torque_body: Vector3::zeros() }, &ObserverGains::default(), 10.0 / 8.0 + 0.1);
        let last = hist.last().unwrap();
        assert!((last.2 - d).amax() < 1e-3 * d.amax());
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = PlantParams::default();
        let good = Measurement { velocity: Vector3::zeros(), body_rate: Vector3::zeros() };
        let bad = Measurement { velocity: Vector3::new(f64::NAN, 0.0, 0.0), body_rate: Vector3::zeros() };
        assert!(ObserverState::new(&bad, &model(&p), (1.0, 0.05)).is_err());
        let s = ObserverState::new(&good, &model(&p), (1.0, 0.05)).unwrap();
        assert!(s.update(&ObserverGains::default(), &bad, &model(&p), &AppliedWrench::default(), 2e-3).is_err());
        assert!(s.update(&ObserverGains::default(), &good, &model(&p), &AppliedWrench::default(), 0.0).is_err());
        let zero_gain = ObserverGains { force: Vector3::new(1.0, 0.0, 1.0), ..Default::default() };
        assert!(zero_gain.validate().is_err());
    }

    #[test]
    fn estimates_stay_within_sanity_clamp() {
        let p = PlantParams::default();
        let m = Measurement { velocity: Vector3::zeros(), body_rate: Vector3::zeros() };
        let mut s = ObserverState::new(&m, &model(&p), (0.5, 0.01)).unwrap();
        // Claims a huge applied force while the vehicle stays still.
        let applied = AppliedWrench { force: Vector3::new(50.0, 0.0, p.mass * p.gravity), torque_body: Vector3::new(0.0, 1.0, 0.0) };
        for _ in 0..1000 {
            s = s.update(&ObserverGains::default(), &m, &model(&p), &applied, 2e-3).unwrap();
            assert!(s.force_estimate.amax() <= 1.0 + 1e-12);
            assert!(s.torque_estimate_body.amax() <= 0.02 + 1e-12);
        }
        assert_relative_eq!(s.force_estimate.x, -1.0);
    }

    #[test]
    fn command_offset_applied_to_plant_leaves_estimates_unchanged() {
        // Adding the same constant to the command and to the real applied force
        // must not move the estimate.
        let p = PlantParams::default();
        let offset = Vector3::new(0.2, -0.1, 0.3);
        let run_with = |extra: Vector3<f64>| {
            let mut s = RigidBodyState::at_rest(Vector3::zeros());
            let meas = |s: &RigidBodyState| Measurement { velocity: s.velocity, body_rate: s.body_rate().unwrap() };
            let mut obs = ObserverState::new(&meas(&s), &model(&p), (10.0, 1.0)).unwrap();
            let f = Vector3::new(0.0, 0.0, p.mass * p.gravity) + extra;
            let d = DisturbanceSample { force: Vector3::new(0.1, 0.0, 0.0), torque_body: Vector3::zeros() };
            for _ in 0..200 {
                s = step(&s, &p, &Actuation::Inertial { force: f, torque: Vector3::zeros() }, &d, 2e-3).unwrap();
                obs = obs
                    .update(&ObserverGains::default(), &meas(&s), &model(&p), &AppliedWrench { force: f, torque_body: Vector3::zeros() }, 2e-3)
                    .unwrap();
            }
            obs.force_estimate
        };
        assert!((run_with(Vector3::zeros()) - run_with(offset)).amax() < 1e-9);
    }

    #[test]
    fn torque_mapping() {
        assert_eq!(torque_estimate_to_inertial(&Vector3::new(1.0, 2.0, 3.0), &Vector3::zeros()).unwrap(), Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(torque_estimate_to_inertial(&Vector3::zeros(), &Vector3::new(0.3, 0.2, 0.1)).unwrap(), Vector3::zeros());
    }

    #[test]
    fn mapped_torque_reproduces_body_form_motion() {
        // Euler form driven by T^T tau_b (held per step) against body-rate form driven by tau_b.
        let p = PlantParams { inertia: Vector3::new(4e-3, 4.5e-3, 7e-3), ..Default::default() };
        let tau_b = Vector3::new(1e-4, -2e-4, 5e-5);
        let mut euler = RigidBodyState {
            attitude: Vector3::new(0.2, -0.3, 0.5),
            attitude_rate: Vector3::new(0.1, 0.3, -0.2),
            ..Default::default()
        };
        let mut body = BodyRateState {
            attitude: euler.attitude,
            body_rate: euler_rate_matrix(&euler.attitude).unwrap() * euler.attitude_rate,
        };
        let dt = 1e-4;
        for _ in 0..5000 {
            let tau = torque_estimate_to_inertial(&tau_b, &euler.attitude).unwrap();
            let input = Actuation::Inertial { force: Vector3::zeros(), torque: tau };
            euler = step(&euler, &p, &input, &DisturbanceSample::default(), dt).unwrap();
            body = step_body_rates(&body, &p.inertia, &tau_b, dt).unwrap();
        }
        assert!((euler.attitude - body.attitude).norm() < 1e-6);
    }

}
