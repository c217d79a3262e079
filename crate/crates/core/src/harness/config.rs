//! Scenario configuration files (TOML, unit-suffixed quantities).
//!
//! ```toml
//! name = "circle_morph"
//! duration = "25 s"
//! seed = 7
//! observer = "on"
//!
//! [trajectory]
//! kind = "circle"
//! radius = "60 cm"
//! center = ["0 m", "0.6 m"]
//! altitude = "1.2 m"
//! period = "5 s"
//!
//! [[morph]]
//! time = "7.7 s"
//! servo = "50 deg"
//! ```
//!
//! Optional tables: `[disturbance]`, `[controller]`, `[observer_gains]`,
//! `[vehicle]`, `[timing]`, `[gap]`, `[[payload]]`. Anything left out takes
//! the library defaults.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::Deserialize;

use super::trajectory::{Trajectory, Waypoint};
use super::units::{Angle, AngularSpeed, Bandwidth, Force, Length, Mass, Time, Torque};
use crate::controller::ControllerGains;
use crate::dynamics::{DisturbanceParams, PlantParams};
use crate::error::{Error, Result};
use crate::morphology::{FoldDirection, MassSet, MorphGeometry};
use crate::observer::ObserverGains;

/// Largest servo angle a schedule may command.
pub const MAX_SERVO_DEG: f64 = 50.0;

const BUNDLED: &[(&str, &str)] = &[
    ("hover_morph", include_str!("../../scenarios/hover_morph.toml")),
    ("circle_morph", include_str!("../../scenarios/circle_morph.toml")),
    ("grasp_transport", include_str!("../../scenarios/grasp_transport.toml")),
    ("gap_pass", include_str!("../../scenarios/gap_pass.toml")),
];

/// Names of the scenarios shipped with the library.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// TOML source of a bundled scenario.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses and validates a bundled scenario.
pub fn bundled(name: &str) -> Result<ScenarioConfig> {
    let src = bundled_source(name)
        .ok_or_else(|| Error::Config { path: "name".into(), message: format!("no bundled scenario `{name}`") })?;
    parse_config(src)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PayloadAction {
    Attach,
    Release,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PayloadEvent {
    pub time: f64,
    pub mass: f64,
    /// Edge of the cube used for the payload inertia.
    pub size: f64,
    pub action: PayloadAction,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorphEvent {
    pub time: f64,
    /// Commanded servo angle [rad].
    pub servo: f64,
}

/// A vertical slot the vehicle must pass, crossing it along x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gap {
    /// Centre of the slot in y.
    pub center: f64,
    /// x-range occupied by the slot walls.
    pub entry: f64,
    pub exit: f64,
    pub width: f64,
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub plant_dt: f64,
    pub control_dt: f64,
}

impl Timing {
    /// Plant steps per control tick.
    pub fn substeps(&self) -> usize {
        (self.control_dt / self.plant_dt).round() as usize
    }
}

impl Default for Timing {
    fn default() -> Self {
        Self { plant_dt: 1e-3, control_dt: 2e-3 }
    }
}

/// A fully validated scenario in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub duration: f64,
    pub seed: u64,
    /// Feed the observer estimates forward into the controller.
    pub observer: bool,
    pub output: Option<PathBuf>,
    pub trajectory: Trajectory,
    pub morph: Vec<MorphEvent>,
    pub payload: Vec<PayloadEvent>,
    pub initial_servo: f64,
    /// Servo slew-rate limit [rad/s].
    pub servo_rate: f64,
    pub disturbance: DisturbanceParams,
    pub gains: ControllerGains,
    pub observer_gains: ObserverGains,
    /// Initial mass estimate as a fraction of the true airframe mass.
    pub mass_estimate_ratio: f64,
    pub geometry: MorphGeometry,
    pub masses: MassSet,
    pub plant: PlantParams,
    pub timing: Timing,
    /// Position-error band used for settling times [m].
    pub settle_band: f64,
    pub gap: Option<Gap>,
}

impl ScenarioConfig {
    /// Number of control ticks logged, including t = 0.
    pub fn tick_count(&self) -> usize {
        (self.duration / self.timing.control_dt + 1e-9).floor() as usize + 1
    }

    /// Event times (morph commands and payload changes), sorted.
    pub fn event_times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.morph.iter().map(|m| m.time).chain(self.payload.iter().map(|p| p.time)).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

#[derive(Deserialize, Clone, Copy, Debug, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ObserverMode {
    #[default]
    On,
    Off,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    duration: Time,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    observer: ObserverMode,
    output: Option<PathBuf>,
    trajectory: RawTrajectory,
    #[serde(default)]
    morph: Vec<RawMorph>,
    #[serde(default)]
    payload: Vec<RawPayload>,
    initial_servo: Option<Angle>,
    servo_rate: Option<AngularSpeed>,
    mass_estimate_ratio: Option<f64>,
    settle_band: Option<Length>,
    #[serde(default)]
    disturbance: RawDisturbance,
    #[serde(default)]
    controller: RawGains,
    #[serde(default)]
    observer_gains: RawObserverGains,
    #[serde(default)]
    vehicle: RawVehicle,
    #[serde(default)]
    timing: RawTiming,
    gap: Option<RawGap>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawTrajectory {
    Hover {
        position: [Length; 3],
        yaw: Option<Angle>,
    },
    Circle {
        radius: Length,
        center: [Length; 2],
        altitude: Length,
        period: Time,
        ramp: Option<Time>,
        start_angle: Option<Angle>,
        yaw: Option<Angle>,
    },
    Waypoints {
        points: Vec<RawWaypoint>,
        yaw: Option<Angle>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWaypoint {
    time: Time,
    position: [Length; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorph {
    time: Time,
    servo: Angle,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum RawAction {
    Attach,
    Release,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPayload {
    time: Time,
    mass: Mass,
    action: RawAction,
    size: Option<Length>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDisturbance {
    enabled: Option<bool>,
    force_bias: Option<[Force; 3]>,
    torque_bias: Option<[Torque; 3]>,
    force_noise: Option<Force>,
    torque_noise: Option<Torque>,
    correlation_time: Option<Time>,
    fold_gain: Option<f64>,
    force_bound: Option<Force>,
    torque_bound: Option<Torque>,
}

/// A gain given either as one number for all axes or as three.
#[derive(Deserialize, Clone, Copy)]
#[serde(untagged)]
enum Gain3 {
    Scalar(f64),
    Vector([f64; 3]),
}

impl Gain3 {
    fn vector(self) -> Vector3<f64> {
        match self {
            Gain3::Scalar(x) => Vector3::repeat(x),
            Gain3::Vector(v) => Vector3::from(v),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGains {
    position_slope: Option<Gain3>,
    attitude_slope: Option<Gain3>,
    position_gain: Option<Gain3>,
    position_switch: Option<Gain3>,
    attitude_gain: Option<Gain3>,
    attitude_switch: Option<Gain3>,
    position_layer: Option<f64>,
    attitude_layer: Option<f64>,
    mass_adaptation: Option<f64>,
    inertia_adaptation: Option<Gain3>,
    setpoint_filter: Option<Time>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawObserverGains {
    force: Option<Bandwidth>,
    torque: Option<Bandwidth>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawVehicle {
    body_length: Option<Length>,
    arm_length: Option<Length>,
    base_length: Option<Length>,
    prop_overhang: Option<Length>,
    max_fold: Option<Angle>,
    servo_gain: Option<f64>,
    fold_direction: Option<FoldDirection>,
    body_mass: Option<Mass>,
    arm_mass: Option<Mass>,
    base_mass: Option<Mass>,
    rotor_mass: Option<Mass>,
    total_mass: Option<Mass>,
    thrust_coeff: Option<f64>,
    drag_coeff: Option<f64>,
    max_rotor_speed: Option<AngularSpeed>,
    gravity: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTiming {
    plant_dt: Option<Time>,
    control_dt: Option<Time>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGap {
    center: Length,
    entry: Length,
    exit: Length,
    width: Length,
    margin: Option<Length>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

fn lengths<const N: usize>(v: [Length; N]) -> [f64; N] {
    v.map(Length::si)
}

/// Reads and validates a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::ConfigParse(m) => Error::ConfigParse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Parses and validates scenario TOML.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    build(raw)
}

fn build(raw: RawConfig) -> Result<ScenarioConfig> {
    let duration = raw.duration.si();
    if !(duration > 0.0) {
        return Err(invalid("duration", "must be positive"));
    }
    if raw.name.trim().is_empty() {
        return Err(invalid("name", "must not be empty"));
    }

    let trajectory = match raw.trajectory {
        RawTrajectory::Hover { position, yaw } => {
            Trajectory::Hover { position: Vector3::from(lengths(position)), yaw: yaw.map_or(0.0, Angle::si) }
        }
        RawTrajectory::Circle { radius, center, altitude, period, ramp, start_angle, yaw } => {
            if !(radius.si() > 0.0) {
                return Err(invalid("trajectory.radius", "must be positive"));
            }
            if !(period.si() > 0.0) {
                return Err(invalid("trajectory.period", "must be positive"));
            }
            let ramp = ramp.map_or(0.0, Time::si);
            if ramp < 0.0 {
                return Err(invalid("trajectory.ramp", "must be non-negative"));
            }
            Trajectory::Circle {
                radius: radius.si(),
                center: lengths(center),
                altitude: altitude.si(),
                period: period.si(),
                ramp,
                start_angle: start_angle.map_or(-std::f64::consts::FRAC_PI_2, Angle::si),
                yaw: yaw.map_or(0.0, Angle::si),
            }
        }
        RawTrajectory::Waypoints { points, yaw } => {
            if points.is_empty() {
                return Err(invalid("trajectory.points", "needs at least one waypoint"));
            }
            if points[0].time.si() != 0.0 {
                return Err(invalid("trajectory.points[0].time", "first waypoint must be at 0 s"));
            }
            for (i, pair) in points.windows(2).enumerate() {
                if !(pair[1].time.si() > pair[0].time.si()) {
                    return Err(invalid(format!("trajectory.points[{}].time", i + 1), "waypoint times must increase"));
                }
            }
            Trajectory::Waypoints {
                points: points
                    .into_iter()
                    .map(|p| Waypoint { time: p.time.si(), position: Vector3::from(lengths(p.position)) })
                    .collect(),
                yaw: yaw.map_or(0.0, Angle::si),
            }
        }
    };

    let max_servo = MAX_SERVO_DEG.to_radians() + 1e-12;
    let mut morph = Vec::with_capacity(raw.morph.len());
    let mut last = f64::NEG_INFINITY;
    for (i, m) in raw.morph.iter().enumerate() {
        let (time, servo) = (m.time.si(), m.servo.si());
        if !(time >= 0.0 && time <= duration) {
            return Err(invalid(format!("morph[{i}].time"), format!("{time} s is outside [0, {duration}] s")));
        }
        if time < last {
            return Err(invalid(format!("morph[{i}].time"), "morph schedule must be sorted by time"));
        }
        if !(0.0..=max_servo).contains(&servo) {
            return Err(invalid(
                format!("morph[{i}].servo"),
                format!("{:.3} deg is outside [0, {MAX_SERVO_DEG}] deg", servo.to_degrees()),
            ));
        }
        last = time;
        morph.push(MorphEvent { time, servo });
    }

    let mut payload = Vec::with_capacity(raw.payload.len());
    let mut last = f64::NEG_INFINITY;
    let mut carried = 0.0;
    for (i, p) in raw.payload.iter().enumerate() {
        let time = p.time.si();
        if !(time >= 0.0 && time <= duration) {
            return Err(invalid(format!("payload[{i}].time"), format!("{time} s is outside [0, {duration}] s")));
        }
        if time < last {
            return Err(invalid(format!("payload[{i}].time"), "payload events must be sorted by time"));
        }
        if !(p.mass.si() > 0.0) {
            return Err(invalid(format!("payload[{i}].mass"), "must be positive"));
        }
        let size = p.size.map_or(0.06, Length::si);
        if !(size >= 0.0) {
            return Err(invalid(format!("payload[{i}].size"), "must be non-negative"));
        }
        let action = match p.action {
            RawAction::Attach => {
                carried += p.mass.si();
                PayloadAction::Attach
            }
            RawAction::Release => {
                carried -= p.mass.si();
                if carried < -1e-12 {
                    return Err(invalid(format!("payload[{i}].mass"), "releases more mass than is attached"));
                }
                PayloadAction::Release
            }
        };
        last = time;
        payload.push(PayloadEvent { time, mass: p.mass.si(), size, action });
    }

    let initial_servo = raw.initial_servo.map_or(0.0, Angle::si);
    if !(0.0..=max_servo).contains(&initial_servo) {
        return Err(invalid("initial_servo", format!("must lie in [0, {MAX_SERVO_DEG}] deg")));
    }
    let servo_rate = raw.servo_rate.map_or(200f64.to_radians(), AngularSpeed::si);
    if !(servo_rate > 0.0) {
        return Err(invalid("servo_rate", "must be positive"));
    }
    let mass_estimate_ratio = raw.mass_estimate_ratio.unwrap_or(0.9);
    if !(mass_estimate_ratio > 0.0) {
        return Err(invalid("mass_estimate_ratio", "must be positive"));
    }
    let settle_band = raw.settle_band.map_or(0.02, Length::si);
    if !(settle_band > 0.0) {
        return Err(invalid("settle_band", "must be positive"));
    }

    let d = raw.disturbance;
    let mut disturbance = if d.enabled == Some(false) { DisturbanceParams::quiet() } else { DisturbanceParams::default() };
    if let Some(v) = d.force_bias {
        disturbance.force_bias = Vector3::from(v.map(Force::si));
    }
    if let Some(v) = d.torque_bias {
        disturbance.torque_bias = Vector3::from(v.map(Torque::si));
    }
    if let Some(v) = d.force_noise {
        disturbance.force_noise = v.si();
    }
    if let Some(v) = d.torque_noise {
        disturbance.torque_noise = v.si();
    }
    if let Some(v) = d.correlation_time {
        disturbance.correlation_time = v.si();
    }
    if let Some(v) = d.fold_gain {
        disturbance.fold_gain = v;
    }
    if let Some(v) = d.force_bound {
        disturbance.force_bound = v.si();
    }
    if let Some(v) = d.torque_bound {
        disturbance.torque_bound = v.si();
    }
    disturbance.validate().map_err(|e| invalid("disturbance", e.to_string()))?;

    let g = raw.controller;
    let mut gains = ControllerGains::default();
    let vec_fields = [
        (g.position_slope, &mut gains.position_slope),
        (g.attitude_slope, &mut gains.attitude_slope),
        (g.position_gain, &mut gains.position_gain),
        (g.position_switch, &mut gains.position_switch),
        (g.attitude_gain, &mut gains.attitude_gain),
        (g.attitude_switch, &mut gains.attitude_switch),
        (g.inertia_adaptation, &mut gains.inertia_adaptation),
    ];
    for (value, slot) in vec_fields {
        if let Some(v) = value {
            *slot = v.vector();
        }
    }
    if let Some(v) = g.position_layer {
        gains.position_layer = v;
    }
    if let Some(v) = g.attitude_layer {
        gains.attitude_layer = v;
    }
    if let Some(v) = g.mass_adaptation {
        gains.mass_adaptation = v;
    }
    if let Some(v) = g.setpoint_filter {
        gains.setpoint_filter = v.si();
    }
    gains
        .validate(disturbance.force_bound, disturbance.torque_bound)
        .map_err(|e| match e {
            Error::Config { path, message } => invalid(path.replacen("gains", "controller", 1), message),
            other => other,
        })?;

    let mut observer_gains = ObserverGains::default();
    if let Some(k) = raw.observer_gains.force {
        observer_gains.force = Vector3::repeat(k.si());
    }
    if let Some(k) = raw.observer_gains.torque {
        observer_gains.torque = Vector3::repeat(k.si());
    }
    observer_gains.validate().map_err(|e| invalid("observer_gains", e.to_string()))?;

    let v = raw.vehicle;
    let mut geometry = MorphGeometry::default();
    let overhang_default = v.prop_overhang.is_none();
    for (value, slot) in [
        (v.body_length, &mut geometry.body_length),
        (v.arm_length, &mut geometry.arm_length),
        (v.base_length, &mut geometry.base_length),
        (v.prop_overhang, &mut geometry.prop_overhang),
    ] {
        if let Some(x) = value {
            *slot = x.si();
        }
    }
    if let Some(a) = v.max_fold {
        geometry.max_fold = a.si();
    }
    if let Some(k) = v.servo_gain {
        geometry.servo_gain = k;
    }
    if let Some(d) = v.fold_direction {
        geometry.fold_direction = d;
    }
    if overhang_default {
        geometry.calibrate_overhang();
    }
    geometry.validate().map_err(|e| invalid("vehicle", e.to_string()))?;

    let mut masses = MassSet::default();
    for (value, slot) in [
        (v.body_mass, &mut masses.body),
        (v.arm_mass, &mut masses.arm),
        (v.base_mass, &mut masses.base),
        (v.rotor_mass, &mut masses.rotor),
    ] {
        if let Some(x) = value {
            *slot = x.si();
        }
    }
    masses.validate(v.total_mass.map(Mass::si)).map_err(|e| invalid("vehicle", e.to_string()))?;

    let mut plant = PlantParams { mass: masses.total(), ..PlantParams::default() };
    if let Some(k) = v.thrust_coeff {
        plant.thrust_coeff = k;
    }
    if let Some(k) = v.drag_coeff {
        plant.drag_coeff = k;
    }
    if let Some(w) = v.max_rotor_speed {
        plant.max_rotor_speed = w.si();
    }
    if let Some(g) = v.gravity {
        plant.gravity = g;
    }
    plant.validate().map_err(|e| invalid("vehicle", e.to_string()))?;

    let mut timing = Timing::default();
    if let Some(t) = raw.timing.plant_dt {
        timing.plant_dt = t.si();
    }
    if let Some(t) = raw.timing.control_dt {
        timing.control_dt = t.si();
    }
    if !(timing.plant_dt > 0.0 && timing.plant_dt <= 0.01) {
        return Err(invalid("timing.plant_dt", "must lie in (0, 10] ms"));
    }
    let ratio = timing.control_dt / timing.plant_dt;
    if !(ratio >= 1.0 - 1e-9 && (ratio - ratio.round()).abs() < 1e-9) {
        return Err(invalid("timing.control_dt", "must be a whole multiple of timing.plant_dt"));
    }

    let gap = match raw.gap {
        None => None,
        Some(g) => {
            if !(g.width.si() > 0.0) {
                return Err(invalid("gap.width", "must be positive"));
            }
            if !(g.exit.si() > g.entry.si()) {
                return Err(invalid("gap.exit", "must lie beyond gap.entry"));
            }
            Some(Gap {
                center: g.center.si(),
                entry: g.entry.si(),
                exit: g.exit.si(),
                width: g.width.si(),
                margin: g.margin.map_or(0.0, Length::si),
            })
        }
    };

    Ok(ScenarioConfig {
        name: raw.name,
        duration,
        seed: raw.seed,
        observer: raw.observer == ObserverMode::On,
        output: raw.output,
        trajectory,
        morph,
        payload,
        initial_servo,
        servo_rate,
        disturbance,
        gains,
        observer_gains,
        mass_estimate_ratio,
        geometry,
        masses,
        plant,
        timing,
        settle_band,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
duration = "2 s"
[trajectory]
kind = "hover"
position = ["0 m", "0 m", "1 m"]
"#;

    #[test]
    fn minimal_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.tick_count(), 1001);
        assert!(c.observer);
        assert_eq!(c.timing.substeps(), 2);
        assert_eq!(c.plant.mass, MassSet::default().total());
        assert_eq!(c.disturbance, DisturbanceParams::default());
    }

    #[test]
    fn missing_duration_is_named() {
        let e = parse_config("name = \"x\"\n[trajectory]\nkind = \"hover\"\nposition = [\"0 m\",\"0 m\",\"1 m\"]\n")
            .unwrap_err();
        assert!(e.to_string().contains("duration"), "{e}");
    }

    #[test]
    fn unsorted_morph_rejected() {
        let src = format!("{MINIMAL}\n[[morph]]\ntime = \"1 s\"\nservo = \"10 deg\"\n[[morph]]\ntime = \"0.5 s\"\nservo = \"0 deg\"\n");
        match parse_config(&src).unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "morph[1].time"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn servo_and_time_bounds() {
        let src = format!("{MINIMAL}\n[[morph]]\ntime = \"1 s\"\nservo = \"60 deg\"\n");
        assert!(matches!(parse_config(&src), Err(Error::Config { path, .. }) if path == "morph[0].servo"));
        let src = format!("{MINIMAL}\n[[morph]]\ntime = \"3 s\"\nservo = \"10 deg\"\n");
        assert!(matches!(parse_config(&src), Err(Error::Config { path, .. }) if path == "morph[0].time"));
    }

    #[test]
    fn weak_switching_gain_rejected() {
        let src = format!("{MINIMAL}\n[controller]\nposition_switch = 0.5\n");
        assert!(matches!(parse_config(&src), Err(Error::Config { path, .. }) if path == "controller.position_switch"));
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let e = parse_config(&format!("{MINIMAL}\nbogus = 1\n")).unwrap_err();
        assert!(matches!(e, Error::ConfigParse(_)));
        assert!(e.to_string().contains("line"), "{e}");
    }

    #[test]
    fn bundled_scenarios_parse() {
        for name in bundled_names() {
            let c = bundled(name).unwrap();
            assert_eq!(c.name, name);
        }
        let c = bundled("circle_morph").unwrap();
        match c.trajectory {
            Trajectory::Circle { radius, period, altitude, center, .. } => {
                assert!((radius - 0.6).abs() < 1e-12);
                assert!((period - 5.0).abs() < 1e-12);
                assert!((altitude - 1.2).abs() < 1e-12);
                assert_eq!(center, [0.0, 0.6]);
            }
            _ => panic!("circle expected"),
        }
    }
}
