use nalgebra::{Matrix3, Vector3};

/// Skew-symmetric matrix with `skew(a) * b == a.cross(b)`.
pub fn skew(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Rotation from body to inertial frame for Z-Y-X (yaw-pitch-roll) Euler angles.
pub fn rotation_zyx(zeta: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = zeta.x.sin_cos();
    let (sth, cth) = zeta.y.sin_cos();
    let (spsi, cpsi) = zeta.z.sin_cos();
    Matrix3::new(
        cpsi * cth,
        cpsi * sth * sphi - spsi * cphi,
        cpsi * sth * cphi + spsi * sphi,
        spsi * cth,
        spsi * sth * sphi + cpsi * cphi,
        spsi * sth * cphi - cpsi * sphi,
        -sth,
        cth * sphi,
        cth * cphi,
    )
}

/// Rotation about an arbitrary unit axis (Rodrigues).
pub fn axis_angle(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = skew(axis);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Wraps an angle to (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

pub(crate) fn all_finite(v: &Vector3<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn skew_matches_cross() {
        let a = Vector3::new(0.3, -1.2, 2.0);
        let b = Vector3::new(-0.7, 0.1, 0.4);
        assert_relative_eq!(skew(&a) * b, a.cross(&b), epsilon = 1e-15);
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = rotation_zyx(&Vector3::new(0.2, -0.4, 1.1));
        assert_relative_eq!(r * r.transpose(), Matrix3::identity(), epsilon = 1e-14);
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn axis_angle_quarter_turn() {
        let r = axis_angle(&Vector3::z(), std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(r * Vector3::x(), Vector3::y(), epsilon = 1e-15);
    }

    #[test]
    fn wrap() {
        assert_relative_eq!(wrap_angle(3.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(wrap_angle(-0.5), -0.5);
    }
}
