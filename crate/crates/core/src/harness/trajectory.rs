//! Reference trajectories sampled by the scenario runner.

use std::f64::consts::TAU;

use nalgebra::Vector3;

use crate::controller::Setpoint;

/// One waypoint of a [`Trajectory::Waypoints`] path.
#[derive(Clone, Debug, PartialEq)]
pub struct Waypoint {
    pub time: f64,
    pub position: Vector3<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Trajectory {
    Hover {
        position: Vector3<f64>,
        yaw: f64,
    },
    /// Horizontal circle at constant altitude. The angular speed rises
    /// smoothly from zero over `ramp` seconds.
    Circle {
        radius: f64,
        center: [f64; 2],
        altitude: f64,
        period: f64,
        ramp: f64,
        start_angle: f64,
        yaw: f64,
    },
    /// Minimum-jerk segments between consecutive waypoints, holding the last.
    Waypoints {
        points: Vec<Waypoint>,
        yaw: f64,
    },
}

/// Minimum-jerk blend `10u^3 - 15u^4 + 6u^5` and its first two derivatives in `u`.
fn min_jerk(u: f64) -> (f64, f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let u2 = u * u;
    let u3 = u2 * u;
    (
        u3 * (10.0 - 15.0 * u + 6.0 * u2),
        30.0 * u2 * (1.0 - 2.0 * u + u2),
        60.0 * u * (1.0 - 3.0 * u + 2.0 * u2),
    )
}

impl Trajectory {
    pub fn yaw(&self) -> f64 {
        match self {
            Trajectory::Hover { yaw, .. } | Trajectory::Circle { yaw, .. } | Trajectory::Waypoints { yaw, .. } => *yaw,
        }
    }

    /// Phase angle, angular speed and angular acceleration of the circle.
    fn circle_phase(period: f64, ramp: f64, t: f64) -> (f64, f64, f64) {
        let w = TAU / period;
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if ramp <= 0.0 {
            return (w * t, w, 0.0);
        }
        if t >= ramp {
            return (w * (0.5 * ramp + (t - ramp)), w, 0.0);
        }
        let u = t / ramp;
        let (h, dh, _) = min_jerk(u);
        // Integral of the blend: 2.5u^4 - 3u^5 + u^6.
        let integral = u.powi(4) * (2.5 - 3.0 * u + u * u);
        (w * ramp * integral, w * h, w * dh / ramp)
    }

    pub fn sample(&self, t: f64) -> Setpoint {
        match self {
            Trajectory::Hover { position, yaw } => Setpoint { yaw: *yaw, ..Setpoint::hold(*position) },
            Trajectory::Circle { radius, center, altitude, period, ramp, start_angle, yaw } => {
                let (phase, rate, accel) = Self::circle_phase(*period, *ramp, t);
                let (s, c) = (start_angle + phase).sin_cos();
                let r = *radius;
                Setpoint {
                    position: Vector3::new(center[0] + r * c, center[1] + r * s, *altitude),
                    velocity: Vector3::new(-r * s * rate, r * c * rate, 0.0),
                    acceleration: Vector3::new(
                        -r * s * accel - r * c * rate * rate,
                        r * c * accel - r * s * rate * rate,
                        0.0,
                    ),
                    yaw: *yaw,
                    yaw_rate: 0.0,
                }
            }
            Trajectory::Waypoints { points, yaw } => {
                let hold = |p: Vector3<f64>| Setpoint { yaw: *yaw, ..Setpoint::hold(p) };
                let Some(first) = points.first() else {
                    return hold(Vector3::zeros());
                };
                if t <= first.time {
                    return hold(first.position);
                }
                for pair in points.windows(2) {
                    let (a, b) = (&pair[0], &pair[1]);
                    if t < b.time {
                        let span = b.time - a.time;
                        let (h, dh, ddh) = min_jerk((t - a.time) / span);
                        let delta = b.position - a.position;
                        return Setpoint {
                            position: a.position + delta * h,
                            velocity: delta * (dh / span),
                            acceleration: delta * (ddh / (span * span)),
                            yaw: *yaw,
                            yaw_rate: 0.0,
                        };
                    }
                }
                hold(points[points.len() - 1].position)
            }
        }
    }
}
