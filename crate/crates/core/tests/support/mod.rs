//! Independent point-mass model of the airframe.
//!
//! Every module is filled with a regular grid of equal point masses placed
//! directly from the geometry lengths; the inertia is the plain sum
//! `sum m (|r|^2 I - r r^T)` about the cloud's own mass center.

#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};

use morphquad::morphology::{FoldDirection, MassSet, MorphGeometry};

/// Points per axis of each box grid (22^3 = 10648 points).
const GRID: usize = 22;

pub struct Cloud {
    pub points: Vec<(f64, Vector3<f64>)>,
    /// Number of points in the smallest module.
    pub min_module_points: usize,
}

fn midpoints(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| (i as f64 + 0.5) / n as f64 - 0.5)
}

/// Box with edges `e1 * a`, `e2 * b`, `e3 * c` centered at `center`.
fn solid_box(
    mass: f64,
    center: Vector3<f64>,
    axes: [(Vector3<f64>, f64); 3],
    out: &mut Vec<(f64, Vector3<f64>)>,
) -> usize {
    let m = mass / (GRID * GRID * GRID) as f64;
    for u in midpoints(GRID) {
        for v in midpoints(GRID) {
            for w in midpoints(GRID) {
                let p = center + axes[0].0 * (u * axes[0].1) + axes[1].0 * (v * axes[1].1) + axes[2].0 * (w * axes[2].1);
                out.push((m, p));
            }
        }
    }
    GRID * GRID * GRID
}

/// Upright cylinder centered at `center`.
fn solid_cylinder(mass: f64, center: Vector3<f64>, radius: f64, height: f64, out: &mut Vec<(f64, Vector3<f64>)>) -> usize {
    let (n, layers) = (40, 10);
    let mut pts = Vec::new();
    for u in midpoints(n) {
        for v in midpoints(n) {
            let (x, y) = (2.0 * u * radius, 2.0 * v * radius);
            if x * x + y * y <= radius * radius {
                for w in midpoints(layers) {
                    pts.push(center + Vector3::new(x, y, w * height));
                }
            }
        }
    }
    let m = mass / pts.len() as f64;
    let count = pts.len();
    out.extend(pts.into_iter().map(|p| (m, p)));
    count
}

pub fn airframe_cloud(alpha: f64, g: &MorphGeometry, masses: &MassSet) -> Cloud {
    let mut points = Vec::new();
    let mut min_points = usize::MAX;
    let z = Vector3::z();
    let down = match g.fold_direction {
        FoldDirection::Down => -1.0,
        FoldDirection::Up => 1.0,
    };
    let n = solid_box(
        masses.body,
        Vector3::zeros(),
        [(Vector3::x(), g.body_length), (Vector3::y(), g.body_length), (z, g.body_height)],
        &mut points,
    );
    min_points = min_points.min(n);
    for k in 0..4 {
        let heading = std::f64::consts::FRAC_PI_4 * (2 * k + 1) as f64;
        let radial = Vector3::new(heading.cos(), heading.sin(), 0.0);
        let tangent = z.cross(&radial);
        let hinge = radial * (0.5 * g.body_length);

        // Arm link tilted by alpha in the radial-vertical plane.
        let along = radial * alpha.cos() + z * (down * alpha.sin());
        let normal = tangent.cross(&along);
        let arm_center = hinge + along * (0.5 * g.arm_length);
        let n = solid_box(
            masses.arm,
            arm_center,
            [(along, g.arm_length), (tangent, g.arm_width), (normal, g.arm_height)],
            &mut points,
        );
        min_points = min_points.min(n);

        // Motor base stays level at the end of the link.
        let tip = hinge + along * g.arm_length;
        let n = solid_box(
            masses.base,
            tip + radial * (0.5 * g.base_length),
            [(radial, g.base_length), (tangent, g.base_width), (z, g.base_height)],
            &mut points,
        );
        min_points = min_points.min(n);

        let n = solid_cylinder(
            masses.rotor,
            tip + radial * g.rotor_offset + z * g.rotor_lift,
            g.rotor_radius,
            g.rotor_height,
            &mut points,
        );
        min_points = min_points.min(n);
    }
    Cloud { points, min_module_points: min_points }
}

impl Cloud {
    pub fn mass_center(&self) -> Vector3<f64> {
        let (m, s) = self.points.iter().fold((0.0, Vector3::zeros()), |(m, s), (mi, p)| (m + mi, s + p * *mi));
        s / m
    }

    pub fn inertia(&self) -> Matrix3<f64> {
        let c = self.mass_center();
        self.points.iter().fold(Matrix3::zeros(), |acc, (m, p)| {
            let r = p - c;
            acc + (Matrix3::identity() * r.norm_squared() - r * r.transpose()) * *m
        })
    }
}
