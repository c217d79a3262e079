//! Fold-angle dependent mass properties of the folding frame.
//!
//! The frame is a square central body with four arms in an X layout. Each arm
//! is a parallelogram linkage hinged at the body edge; folding rotates the arm
//! about a horizontal axis perpendicular to its radial direction while the
//! motor base at its tip keeps a fixed orientation. Everything here is a pure
//! function of the fold angle and the static geometry.
//!
//! The center frame `F_c` sits at the geometric center of the body, at the
//! height of the arm hinges. Module rest heights are measured from there.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::math::{axis_angle, skew};

/// Overall stretched width including propellers [m].
pub const STRETCHED_SPAN: f64 = 0.41;

/// Which way the arms swing when the frame contracts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FoldDirection {
    #[default]
    Down,
    Up,
}

impl FoldDirection {
    fn sign(self) -> f64 {
        match self {
            FoldDirection::Down => -1.0,
            FoldDirection::Up => 1.0,
        }
    }
}

/// Static lengths and shape parameters of the frame, SI units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphGeometry {
    /// Side length of the square central body.
    pub body_length: f64,
    /// Length of one arm link (hinge to motor base).
    pub arm_length: f64,
    /// Length of a motor base along the radial direction.
    pub base_length: f64,
    pub body_height: f64,
    pub rotor_height: f64,
    pub rotor_radius: f64,
    pub arm_height: f64,
    pub arm_width: f64,
    pub base_height: f64,
    pub base_width: f64,
    /// Vertical offset of the rotor CoG above the motor base CoG.
    pub rotor_lift: f64,
    /// Horizontal offset of the rotor axis from the inner end of the motor base.
    pub rotor_offset: f64,
    /// Propeller overhang beyond the frame on each side.
    pub prop_overhang: f64,
    /// Largest reachable fold angle [rad].
    pub max_fold: f64,
    /// Ratio between fold angle and servo angle.
    pub servo_gain: f64,
    pub fold_direction: FoldDirection,
}

impl Default for MorphGeometry {
    fn default() -> Self {
        let mut geom = Self {
            body_length: 0.122,
            arm_length: 0.09,
            base_length: 0.04,
            body_height: 0.04,
            rotor_height: 0.02,
            rotor_radius: 0.014,
            arm_height: 0.008,
            arm_width: 0.012,
            base_height: 0.02,
            base_width: 0.03,
            rotor_lift: 0.02,
            rotor_offset: 0.02,
            prop_overhang: 0.0,
            max_fold: 70f64.to_radians(),
            servo_gain: 1.4,
            fold_direction: FoldDirection::Down,
        };
        geom.calibrate_overhang();
        geom
    }
}

impl MorphGeometry {
    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("body_length", self.body_length),
            ("arm_length", self.arm_length),
            ("base_length", self.base_length),
            ("body_height", self.body_height),
            ("rotor_height", self.rotor_height),
            ("rotor_radius", self.rotor_radius),
            ("arm_height", self.arm_height),
            ("arm_width", self.arm_width),
            ("base_height", self.base_height),
            ("base_width", self.base_width),
            ("rotor_lift", self.rotor_lift),
            ("rotor_offset", self.rotor_offset),
            ("prop_overhang", self.prop_overhang),
        ];
        for (name, value) in lengths {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain(format!("geometry.{name} must be positive, got {value}")));
            }
        }
        if !(self.max_fold > 0.0 && self.max_fold <= FRAC_PI_2) {
            return Err(Error::Domain(format!(
                "geometry.max_fold must lie in (0, pi/2], got {}",
                self.max_fold
            )));
        }
        if !(self.servo_gain > 0.0 && self.servo_gain.is_finite()) {
            return Err(Error::Domain(format!(
                "geometry.servo_gain must be positive, got {}",
                self.servo_gain
            )));
        }
        Ok(())
    }

    fn check_fold(&self, alpha: f64) -> Result<()> {
        // Small slack so schedules that land exactly on max_fold after a
        // rate-limited ramp are not rejected for rounding.
        if !(alpha >= -1e-12 && alpha <= self.max_fold + 1e-12) {
            return Err(Error::Domain(format!(
                "fold angle {alpha} rad outside [0, {}]",
                self.max_fold
            )));
        }
        Ok(())
    }

    /// Sets the propeller overhang so the stretched span including propellers is 0.41 m.
    pub fn calibrate_overhang(&mut self) {
        self.prop_overhang = 0.5 * (STRETCHED_SPAN - self.stretched_frame_length());
    }

    fn stretched_frame_length(&self) -> f64 {
        (self.body_length + 2.0 * self.arm_length + 2.0 * self.base_length) / SQRT_2
    }

    /// Horizontal distance from the center to a rotor axis.
    pub fn rotor_radius_at(&self, alpha: f64) -> f64 {
        0.5 * self.body_length + self.arm_length * alpha.cos() + self.rotor_offset
    }
}

/// Per-module masses [kg].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassSet {
    pub body: f64,
    pub arm: f64,
    pub base: f64,
    pub rotor: f64,
}

impl Default for MassSet {
    /// Split of the 0.805 kg airframe.
    fn default() -> Self {
        Self { body: 0.485, arm: 0.020, base: 0.030, rotor: 0.030 }
    }
}

impl MassSet {
    pub fn total(&self) -> f64 {
        self.body + 4.0 * (self.arm + self.base + self.rotor)
    }

    /// Checks non-negativity and, when given, agreement with a configured total.
    pub fn validate(&self, total: Option<f64>) -> Result<()> {
        for (name, m) in [("body", self.body), ("arm", self.arm), ("base", self.base), ("rotor", self.rotor)] {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("masses.{name} must be non-negative, got {m}")));
            }
        }
        if let Some(expected) = total {
            if (self.total() - expected).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "module masses sum to {} kg but total mass is {expected} kg",
                    self.total()
                )));
            }
        }
        Ok(())
    }
}

/// Geometry-derived properties at one fold angle.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphState {
    pub fold: f64,
    pub servo: f64,
    pub tip_to_tip: f64,
    /// Center of gravity relative to `F_c`.
    pub cog: Vector3<f64>,
    /// Principal moments (Jxx, Jyy, Jzz) about the CoG.
    pub inertia: Vector3<f64>,
}

impl MorphState {
    pub fn from_servo(servo: f64, geom: &MorphGeometry, masses: &MassSet) -> Result<Self> {
        let fold = fold_angle_from_servo(servo, geom)?;
        let mut state = Self::at_fold(fold, geom, masses)?;
        state.servo = servo;
        Ok(state)
    }

    pub fn at_fold(fold: f64, geom: &MorphGeometry, masses: &MassSet) -> Result<Self> {
        Ok(Self {
            fold,
            servo: fold / geom.servo_gain,
            tip_to_tip: tip_to_tip_length(fold, geom)?,
            cog: cog_offset(fold, geom, masses)?,
            inertia: total_inertia(fold, geom, masses)?,
        })
    }
}

/// Fold angle commanded by a servo angle, saturated at the mechanical stop.
pub fn fold_angle_from_servo(servo: f64, geom: &MorphGeometry) -> Result<f64> {
    if !(servo >= 0.0) {
        return Err(Error::Domain(format!("servo angle must be non-negative, got {servo}")));
    }
    Ok((geom.servo_gain * servo).clamp(0.0, geom.max_fold))
}

/// Distance between opposite motor-base tips.
pub fn tip_to_tip_length(alpha: f64, geom: &MorphGeometry) -> Result<f64> {
    geom.check_fold(alpha)?;
    Ok(geom.body_length + 2.0 * geom.arm_length * alpha.cos() + 2.0 * geom.base_length)
}

/// Distance between adjacent motor bases (side of the X-frame square).
pub fn frame_length(alpha: f64, geom: &MorphGeometry) -> Result<f64> {
    Ok(tip_to_tip_length(alpha, geom)? / SQRT_2)
}

/// Unit radial direction of arm `index` (0..4), arms at 45°, 135°, 225°, 315°.
pub fn arm_direction(index: usize) -> Vector3<f64> {
    let heading = FRAC_PI_4 + FRAC_PI_2 * index as f64;
    Vector3::new(heading.cos(), heading.sin(), 0.0)
}

/// Rotation carrying arm `index` from its stretched pose to fold angle `alpha`.
pub fn fold_rotation(alpha: f64, index: usize, direction: FoldDirection) -> Matrix3<f64> {
    // Rotating about z x u moves the arm tip toward -z.
    let axis = Vector3::z().cross(&arm_direction(index)) * -direction.sign();
    axis_angle(&axis, alpha)
}

/// CoG positions of every arm, motor base and rotor in `F_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulePositions {
    pub arms: [Vector3<f64>; 4],
    pub bases: [Vector3<f64>; 4],
    pub rotors: [Vector3<f64>; 4],
}

pub fn module_positions(alpha: f64, geom: &MorphGeometry) -> Result<ModulePositions> {
    geom.check_fold(alpha)?;
    let vertical = geom.fold_direction.sign() * alpha.sin();
    let mut out = ModulePositions {
        arms: [Vector3::zeros(); 4],
        bases: [Vector3::zeros(); 4],
        rotors: [Vector3::zeros(); 4],
    };
    for i in 0..4 {
        let u = arm_direction(i);
        let hinge = 0.5 * geom.body_length;
        let reach = geom.arm_length * alpha.cos();
        let drop = geom.arm_length * vertical;
        out.arms[i] = u * (hinge + 0.5 * reach) + Vector3::z() * (0.5 * drop);
        out.bases[i] = u * (hinge + reach + 0.5 * geom.base_length) + Vector3::z() * drop;
        out.rotors[i] =
            u * (hinge + reach + geom.rotor_offset) + Vector3::z() * (drop + geom.rotor_lift);
    }
    Ok(out)
}

/// Offset of the center of gravity from `F_c`.
pub fn cog_offset(alpha: f64, geom: &MorphGeometry, masses: &MassSet) -> Result<Vector3<f64>> {
    let total = masses.total();
    if !(total > 0.0) {
        return Err(Error::Domain("total mass must be positive".into()));
    }
    let pos = module_positions(alpha, geom)?;
    let mut moment = Vector3::zeros();
    for i in 0..4 {
        moment += masses.arm * pos.arms[i] + masses.base * pos.bases[i] + masses.rotor * pos.rotors[i];
    }
    let mut cog = moment / total;
    // The four-fold symmetry cancels x and y exactly in exact arithmetic;
    // remove the rounding residue so downstream symmetry checks are clean.
    cog.x = 0.0;
    cog.y = 0.0;
    Ok(cog)
}

/// Idealized solid used to approximate a module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    /// Square footprint `side × side`, given height; the central body.
    SquareBox { side: f64, height: f64 },
    /// Solid cylinder with its axis along z.
    Cylinder { radius: f64, height: f64 },
    /// Rectangular cuboid with `length` along x, `width` along y, `height` along z.
    Cuboid { length: f64, width: f64, height: f64 },
}

/// Principal moments of a homogeneous solid about its own CoG.
pub fn primitive_inertia(shape: Shape, mass: f64) -> Result<Vector3<f64>> {
    if !(mass >= 0.0) {
        return Err(Error::Domain(format!("mass must be non-negative, got {mass}")));
    }
    let dims: &[f64] = match &shape {
        Shape::SquareBox { side, height } => &[*side, *height],
        Shape::Cylinder { radius, height } => &[*radius, *height],
        Shape::Cuboid { length, width, height } => &[*length, *width, *height],
    };
    if dims.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Domain(format!("shape dimensions must be positive: {shape:?}")));
    }
    let k = mass / 12.0;
    Ok(match shape {
        Shape::SquareBox { side, height } => {
            let (l2, h2) = (side * side, height * height);
            Vector3::new(k * (l2 + h2), k * (l2 + h2), k * 2.0 * l2)
        }
        Shape::Cylinder { radius, height } => {
            let (r2, h2) = (radius * radius, height * height);
            Vector3::new(k * (3.0 * r2 + h2), k * (3.0 * r2 + h2), k * 6.0 * r2)
        }
        Shape::Cuboid { length, width, height } => {
            let (a, b, c) = (length * length, width * width, height * height);
            Vector3::new(k * (b + c), k * (a + c), k * (a + b))
        }
    })
}

/// Similarity transform of a diagonal arm inertia (axes aligned with `F_c`)
/// through the fold rotation of arm `index` (0..4).
pub fn rotate_arm_inertia(arm_inertia: &Vector3<f64>, alpha: f64, index: usize) -> Result<Matrix3<f64>> {
    if index >= 4 {
        return Err(Error::Domain(format!("arm index {index} out of range 0..4")));
    }
    let r = fold_rotation(alpha, index, FoldDirection::Down);
    Ok(r * Matrix3::from_diagonal(arm_inertia) * r.transpose())
}

/// A rigid piece contributing to the composite inertia.
#[derive(Clone, Debug, PartialEq)]
pub struct InertiaPart {
    pub mass: f64,
    /// Inertia about the part's own CoG, expressed in `F_c` axes.
    pub inertia: Matrix3<f64>,
    pub position: Vector3<f64>,
}

/// Composite inertia about `about` using `J_i - m_i S(r_i - about)^2`.
pub fn assemble_inertia(parts: &[InertiaPart], about: &Vector3<f64>) -> Matrix3<f64> {
    parts.iter().fold(Matrix3::zeros(), |acc, part| {
        let s = skew(&(part.position - about));
        acc + part.inertia - part.mass * s * s
    })
}

/// Every module of the airframe as an inertia part at fold angle `alpha`.
pub fn airframe_parts(alpha: f64, geom: &MorphGeometry, masses: &MassSet) -> Result<Vec<InertiaPart>> {
    let pos = module_positions(alpha, geom)?;
    let body = primitive_inertia(
        Shape::SquareBox { side: geom.body_length, height: geom.body_height },
        masses.body,
    )?;
    let arm = primitive_inertia(
        Shape::Cuboid { length: geom.arm_length, width: geom.arm_width, height: geom.arm_height },
        masses.arm,
    )?;
    let base = primitive_inertia(
        Shape::Cuboid { length: geom.base_length, width: geom.base_width, height: geom.base_height },
        masses.base,
    )?;
    let rotor = primitive_inertia(
        Shape::Cylinder { radius: geom.rotor_radius, height: geom.rotor_height },
        masses.rotor,
    )?;

    let mut parts = Vec::with_capacity(13);
    parts.push(InertiaPart { mass: masses.body, inertia: Matrix3::from_diagonal(&body), position: Vector3::zeros() });
    for i in 0..4 {
        // Arm and base principal axes are radial/tangential; yaw them onto the arm first.
        let heading = axis_angle(&Vector3::z(), FRAC_PI_4 + FRAC_PI_2 * i as f64);
        let fold = fold_rotation(alpha, i, geom.fold_direction);
        let arm_rest = heading * Matrix3::from_diagonal(&arm) * heading.transpose();
        let base_rest = heading * Matrix3::from_diagonal(&base) * heading.transpose();
        parts.push(InertiaPart {
            mass: masses.arm,
            inertia: fold * arm_rest * fold.transpose(),
            position: pos.arms[i],
        });
        parts.push(InertiaPart { mass: masses.base, inertia: base_rest, position: pos.bases[i] });
        parts.push(InertiaPart {
            mass: masses.rotor,
            inertia: Matrix3::from_diagonal(&rotor),
            position: pos.rotors[i],
        });
    }
    Ok(parts)
}

/// Full composite inertia tensor about the CoG.
pub fn total_inertia_matrix(alpha: f64, geom: &MorphGeometry, masses: &MassSet) -> Result<Matrix3<f64>> {
    let parts = airframe_parts(alpha, geom, masses)?;
    let cog = cog_offset(alpha, geom, masses)?;
    let j = assemble_inertia(&parts, &cog);
    if j.cholesky().is_none() {
        return Err(Error::Inertia(format!("{j:?}")));
    }
    Ok(j)
}

/// Diagonal (Jxx, Jyy, Jzz) of the composite inertia about the CoG.
pub fn total_inertia(alpha: f64, geom: &MorphGeometry, masses: &MassSet) -> Result<Vector3<f64>> {
    Ok(total_inertia_matrix(alpha, geom, masses)?.diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn servo_mapping() {
        let g = MorphGeometry::default();
        assert_eq!(fold_angle_from_servo(0.0, &g).unwrap(), 0.0);
        assert_relative_eq!(fold_angle_from_servo(deg(50.0), &g).unwrap(), deg(70.0), epsilon = 1e-12);
        assert_relative_eq!(fold_angle_from_servo(deg(25.0), &g).unwrap(), deg(35.0), epsilon = 1e-12);
        assert_relative_eq!(fold_angle_from_servo(deg(80.0), &g).unwrap(), g.max_fold);
        assert!(fold_angle_from_servo(-0.1, &g).is_err());
    }

    #[test]
    fn tip_to_tip_values() {
        let mut g = MorphGeometry::default();
        assert_relative_eq!(tip_to_tip_length(0.0, &g).unwrap(), 0.382, epsilon = 1e-12);
        // 0.122 + 2 * 0.09 * cos 70° + 0.08
        assert_relative_eq!(tip_to_tip_length(deg(70.0), &g).unwrap(), 0.2635640, epsilon = 1e-6);
        g.max_fold = FRAC_PI_2;
        assert_relative_eq!(tip_to_tip_length(FRAC_PI_2, &g).unwrap(), 0.202, epsilon = 1e-12);
        g.max_fold = deg(70.0);
        assert!(tip_to_tip_length(deg(71.0), &g).is_err());
        assert!(tip_to_tip_length(-0.01, &g).is_err());
    }

    #[test]
    fn frame_length_values() {
        let g = MorphGeometry::default();
        let open = frame_length(0.0, &g).unwrap();
        let closed = frame_length(deg(70.0), &g).unwrap();
        assert!((open - 0.270).abs() < 1e-3);
        assert!((closed - 0.1864).abs() < 1e-4);
        assert!((closed / open - 0.690).abs() < 1e-3);
    }

    #[test]
    fn positions_at_rest_and_symmetry() {
        let g = MorphGeometry::default();
        let p = module_positions(0.0, &g).unwrap();
        for i in 0..4 {
            assert_eq!(p.arms[i].z, 0.0);
            assert_eq!(p.bases[i].z, 0.0);
            assert_eq!(p.rotors[i].z, g.rotor_lift);
        }
        for alpha in [0.0, 0.3, deg(70.0)] {
            let p = module_positions(alpha, &g).unwrap();
            let sum: Vector3<f64> = p.arms.iter().chain(&p.bases).chain(&p.rotors).sum();
            assert!(sum.x.abs() < 1e-15 && sum.y.abs() < 1e-15);
        }
    }

    #[test]
    fn rotor_radius_when_folded() {
        let g = MorphGeometry::default();
        let a = deg(70.0);
        let p = module_positions(a, &g).unwrap();
        let expected = 0.061 + 0.09 * a.cos() + g.rotor_offset;
        for r in p.rotors {
            assert_relative_eq!(r.xy().norm(), expected, epsilon = 1e-14);
        }
        assert_relative_eq!(g.rotor_radius_at(a), expected, epsilon = 1e-14);
    }

    #[test]
    fn cog_matches_point_mass_sum() {
        let g = MorphGeometry::default();
        let m = MassSet::default();
        let a = deg(70.0);
        // Independent evaluation: each module is a point at its analytic location.
        let drop = -g.arm_length * a.sin();
        let z_num = 4.0 * (m.arm * 0.5 * drop + m.base * drop + m.rotor * (drop + g.rotor_lift));
        let cog = cog_offset(a, &g, &m).unwrap();
        assert_relative_eq!(cog.z, z_num / 0.805, epsilon = 1e-14);
        assert_eq!(cog.x, 0.0);
        assert_eq!(cog.y, 0.0);
    }

    #[test]
    fn cog_all_modules_at_center_plane() {
        let g = MorphGeometry { rotor_lift: 1e-300, ..MorphGeometry::default() };
        let c = cog_offset(0.0, &g, &MassSet::default()).unwrap();
        assert!(c.norm() < 1e-15);
        let zero = MassSet { body: 0.0, arm: 0.0, base: 0.0, rotor: 0.0 };
        assert!(cog_offset(0.0, &g, &zero).is_err());
    }

    #[test]
    fn primitives() {
        assert_eq!(
            primitive_inertia(Shape::Cuboid { length: 1.0, width: 1.0, height: 1.0 }, 0.0).unwrap(),
            Vector3::zeros()
        );
        let b = primitive_inertia(Shape::SquareBox { side: 0.122, height: 0.04 }, 0.4).unwrap();
        assert_relative_eq!(b.x, 0.4 / 12.0 * (0.122f64.powi(2) + 0.04f64.powi(2)), epsilon = 1e-15);
        assert_relative_eq!(b.x, 5.4947e-4, epsilon = 1e-7);
        let c = primitive_inertia(Shape::Cylinder { radius: 0.05, height: 0.01 }, 0.3).unwrap();
        assert_relative_eq!(c.z, 0.3 * 0.05 * 0.05 / 2.0, epsilon = 1e-16);
        assert!(primitive_inertia(Shape::Cylinder { radius: 0.05, height: 0.01 }, -1.0).is_err());
        assert!(primitive_inertia(Shape::Cylinder { radius: -0.05, height: 0.01 }, 1.0).is_err());
    }

    #[test]
    fn arm_rotation() {
        let j = Vector3::new(1e-4, 2e-4, 3e-4);
        for i in 0..4 {
            assert_relative_eq!(rotate_arm_inertia(&j, 0.0, i).unwrap(), Matrix3::from_diagonal(&j), epsilon = 1e-20);
        }
        let a = deg(70.0);
        let rotated = rotate_arm_inertia(&j, a, 1).unwrap();
        assert_relative_eq!(rotated.trace(), 6e-4, epsilon = 1e-18);
        // Brute-force product with an explicitly built rotation about the fold axis
        // of arm 1 (radial direction at 135°, axis = z × u).
        let (s, c) = a.sin_cos();
        let u = Vector3::new(-FRAC_PI_4.cos(), FRAC_PI_4.sin(), 0.0);
        let n = Vector3::new(-u.y, u.x, 0.0);
        let mut r = Matrix3::zeros();
        for row in 0..3 {
            for col in 0..3 {
                let delta = if row == col { 1.0 } else { 0.0 };
                let eps = match (row, col) {
                    (0, 1) => -n.z, (0, 2) => n.y, (1, 0) => n.z,
                    (1, 2) => -n.x, (2, 0) => -n.y, (2, 1) => n.x, _ => 0.0,
                };
                r[(row, col)] = c * delta + (1.0 - c) * n[row] * n[col] + s * eps;
            }
        }
        let mut expected = Matrix3::zeros();
        for row in 0..3 {
            for col in 0..3 {
                for k in 0..3 {
                    expected[(row, col)] += r[(row, k)] * j[k] * r[(col, k)];
                }
            }
        }
        assert_relative_eq!(rotated, expected, epsilon = 1e-18);
        assert!(rotate_arm_inertia(&j, a, 4).is_err());
    }

    #[test]
    fn body_only_inertia() {
        let g = MorphGeometry::default();
        let m = MassSet { body: 0.485, arm: 0.0, base: 0.0, rotor: 0.0 };
        let j = total_inertia(0.5, &g, &m).unwrap();
        let jb = primitive_inertia(Shape::SquareBox { side: g.body_length, height: g.body_height }, 0.485).unwrap();
        assert_relative_eq!(j, jb, epsilon = 1e-18);
    }

    #[test]
    fn parallel_axis_with_zero_offsets_is_raw_sum() {
        let g = MorphGeometry::default();
        let mut parts = airframe_parts(0.4, &g, &MassSet::default()).unwrap();
        for p in parts.iter_mut() {
            p.position = Vector3::zeros();
        }
        let raw: Matrix3<f64> = parts.iter().map(|p| p.inertia).sum();
        assert_relative_eq!(assemble_inertia(&parts, &Vector3::zeros()), raw, epsilon = 1e-18);
    }

    #[test]
    fn upward_fold_mirrors_vertical_offsets() {
        let mut g = MorphGeometry::default();
        let down = module_positions(0.6, &g).unwrap();
        g.fold_direction = FoldDirection::Up;
        let up = module_positions(0.6, &g).unwrap();
        assert_relative_eq!(down.arms[0].z, -up.arms[0].z, epsilon = 1e-15);
        let jd = total_inertia(0.6, &MorphGeometry::default(), &MassSet::default()).unwrap();
        let ju = total_inertia(0.6, &g, &MassSet::default()).unwrap();
        assert_relative_eq!(jd.z, ju.z, epsilon = 1e-15);
    }

    #[test]
    fn default_split_matches_total() {
        MassSet::default().validate(Some(0.805)).unwrap();
        assert!(MassSet::default().validate(Some(0.9)).is_err());
        MorphGeometry::default().validate().unwrap();
        let g = MorphGeometry::default();
        assert_relative_eq!(frame_length(0.0, &g).unwrap() + 2.0 * g.prop_overhang, 0.41, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn length_decreasing_with_analytic_slope(a in 0.001f64..1.2) {
            let g = MorphGeometry::default();
            let h = 1e-6;
            let fd = (tip_to_tip_length(a + h, &g).unwrap() - tip_to_tip_length(a - h, &g).unwrap()) / (2.0 * h);
            prop_assert!((fd + 2.0 * g.arm_length * a.sin()).abs() < 1e-6);
            prop_assert!(tip_to_tip_length(a + 1e-3, &g).unwrap() < tip_to_tip_length(a, &g).unwrap());
        }

        #[test]
        fn inertia_symmetric_positive_diagonal(a in 0.0f64..1.2217) {
            let g = MorphGeometry::default();
            let m = MassSet::default();
            let j = total_inertia_matrix(a, &g, &m).unwrap();
            let scale = j.diagonal().max();
            prop_assert!((j - j.transpose()).abs().max() < 1e-18);
            for (r, c) in [(0, 1), (0, 2), (1, 2)] {
                prop_assert!(j[(r, c)].abs() < 1e-12 * scale);
            }
            prop_assert!((j[(0, 0)] - j[(1, 1)]).abs() < 1e-12 * scale);
            let cog = cog_offset(a, &g, &m).unwrap();
            prop_assert!(cog.x.abs() < 1e-12 && cog.y.abs() < 1e-12);
        }

        #[test]
        fn yaw_inertia_and_cog_height_decrease(a in 0.0f64..1.2) {
            let g = MorphGeometry::default();
            let m = MassSet::default();
            let b = a + 0.02;
            prop_assert!(total_inertia(b, &g, &m).unwrap().z < total_inertia(a, &g, &m).unwrap().z);
            prop_assert!(cog_offset(b, &g, &m).unwrap().z <= cog_offset(a, &g, &m).unwrap().z);
        }
    }
}
