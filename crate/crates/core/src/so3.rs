//! Axis-angle rotations: the exponential map on SO(3) and its Jacobian.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Angle below which the Taylor branches of [`rodrigues`] and
/// [`rodrigues_jacobian`] are used. Keeps both the rotation and its gradient
/// finite and smooth through the zero vector.
pub const SMALL_ANGLE: f64 = 1e-8;

fn cross_matrix(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Rotation matrix for an axis-angle vector (angle = norm, axis = direction).
///
/// Uses a second-order Taylor branch below [`SMALL_ANGLE`] so the map is
/// smooth at the origin.
pub fn rodrigues(axis_angle: &Vector3<f64>) -> Result<Matrix3<f64>> {
    if !axis_angle.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("axis-angle vector has non-finite entries"));
    }
    Ok(rodrigues_unchecked(axis_angle))
}

pub(crate) fn rodrigues_unchecked(axis_angle: &Vector3<f64>) -> Matrix3<f64> {
    let theta = axis_angle.norm();
    let k = cross_matrix(axis_angle);
    let (a, b) = sin_cos_coeffs(theta);
    Matrix3::identity() + k * a + k * k * b
}

// a = sin(t)/t, b = (1-cos(t))/t^2 with Taylor fallbacks.
fn sin_cos_coeffs(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        let t2 = theta * theta;
        (theta.sin() / theta, (1.0 - theta.cos()) / t2)
    }
}

/// Derivative of the rotation matrix w.r.t. the axis-angle components.
///
/// Returns `[dR/dw_x, dR/dw_y, dR/dw_z]`.
pub fn rodrigues_jacobian(axis_angle: &Vector3<f64>) -> [Matrix3<f64>; 3] {
    let theta = axis_angle.norm();
    let k = cross_matrix(axis_angle);
    let k2 = k * k;
    let (a, b) = sin_cos_coeffs(theta);
    // a'(t)/t and b'(t)/t, again with Taylor fallbacks near zero.
    let (da_over_t, db_over_t) = if theta < 1e-4 {
        let t2 = theta * theta;
        (-1.0 / 3.0 + t2 / 30.0, -1.0 / 12.0 + t2 / 180.0)
    } else {
        let t2 = theta * theta;
        let da = (theta * theta.cos() - theta.sin()) / t2;
        let db = (theta * theta.sin() - 2.0 * (1.0 - theta.cos())) / (t2 * theta);
        (da / theta, db / theta)
    };
    let mut out = [Matrix3::zeros(); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut e = Vector3::zeros();
        e[i] = 1.0;
        let ke = cross_matrix(&e);
        let wi = axis_angle[i];
        *slot = k * (da_over_t * wi)
            + ke * a
            + k2 * (db_over_t * wi)
            + (ke * k + k * ke) * b;
    }
    out
}

/// Contracts a cotangent `dE/dR` against the Jacobian, giving `dE/dw`.
pub fn rodrigues_vjp(axis_angle: &Vector3<f64>, r_bar: &Matrix3<f64>) -> Vector3<f64> {
    let jac = rodrigues_jacobian(axis_angle);
    Vector3::new(
        jac[0].component_mul(r_bar).sum(),
        jac[1].component_mul(r_bar).sum(),
        jac[2].component_mul(r_bar).sum(),
    )
}

/// Wraps an axis-angle vector so its norm lies in `[0, pi]`.
///
/// `w` and `(|w| - 2*pi*k) * w/|w|` encode the same rotation; this picks the
/// representative with the smallest angle (flipping the axis when the wrapped
/// angle is negative).
pub fn canonicalize(axis_angle: &Vector3<f64>) -> Vector3<f64> {
    let theta = axis_angle.norm();
    if theta <= std::f64::consts::PI || theta < SMALL_ANGLE {
        return *axis_angle;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut wrapped = theta % two_pi;
    if wrapped > std::f64::consts::PI {
        wrapped -= two_pi;
    }
    axis_angle * (wrapped / theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_axis_angle(rng: &mut impl rand::Rng, scale: f64) -> Vector3<f64> {
        let n = StandardNormal;
        Vector3::new(n.sample(rng), n.sample(rng), n.sample(rng)) * scale
    }

    // Independent oracle: rotation matrix via unit-quaternion algebra.
    fn quaternion_rotation(w: &Vector3<f64>) -> Matrix3<f64> {
        let theta = w.norm();
        let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        let axis = if theta > 0.0 { w / theta } else { Vector3::x() };
        let (qw, qx, qy, qz) = (c, s * axis.x, s * axis.y, s * axis.z);
        Matrix3::new(
            1.0 - 2.0 * (qy * qy + qz * qz),
            2.0 * (qx * qy - qz * qw),
            2.0 * (qx * qz + qy * qw),
            2.0 * (qx * qy + qz * qw),
            1.0 - 2.0 * (qx * qx + qz * qz),
            2.0 * (qy * qz - qx * qw),
            2.0 * (qx * qz - qy * qw),
            2.0 * (qy * qz + qx * qw),
            1.0 - 2.0 * (qx * qx + qy * qy),
        )
    }

    #[test]
    fn zero_rotation_is_identity() {
        let r = rodrigues(&Vector3::zeros()).unwrap();
        assert_eq!(r, Matrix3::identity());
    }

    #[test]
    fn half_turn_about_z() {
        let r = rodrigues(&Vector3::new(0.0, 0.0, std::f64::consts::PI)).unwrap();
        let v = r * Vector3::new(1.0, 0.0, 0.0);
        assert_relative_eq!(v.x, -1.0, epsilon = 1e-12);
        assert!(v.y.abs() < 1e-12 && v.z.abs() < 1e-12);
    }

    #[test]
    fn matches_quaternion_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w = random_axis_angle(&mut rng, 1.2);
            let r = rodrigues(&w).unwrap();
            let q = quaternion_rotation(&w);
            assert!((r - q).abs().max() < 1e-12, "mismatch for {w:?}");
        }
    }

    #[test]
    fn orthonormal_with_unit_determinant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let w = random_axis_angle(&mut rng, 2.0);
            let r = rodrigues(&w).unwrap();
            let rtr = r.transpose() * r;
            assert!((rtr - Matrix3::identity()).abs().max() < 1e-12);
            assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(rodrigues(&Vector3::new(f64::NAN, 0.0, 0.0)).is_err());
        assert!(rodrigues(&Vector3::new(0.0, f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn smooth_near_zero() {
        // Values straddling the Taylor cutoff agree to high precision.
        let w = Vector3::new(4e-9, -3e-9, 2e-9);
        let r_small = rodrigues(&w).unwrap();
        let r_scaled = rodrigues(&(w * 10.0)).unwrap();
        assert!((r_small - Matrix3::identity()).abs().max() < 1e-8);
        assert!((r_scaled - Matrix3::identity()).abs().max() < 1e-7);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for trial in 0..50 {
            // Include near-zero configurations to exercise the Taylor branch.
            let scale = if trial % 5 == 0 { 1e-5 } else { 1.0 };
            let w = random_axis_angle(&mut rng, scale);
            let jac = rodrigues_jacobian(&w);
            for i in 0..3 {
                let mut wp = w;
                let mut wm = w;
                wp[i] += h;
                wm[i] -= h;
                let fd = (rodrigues(&wp).unwrap() - rodrigues(&wm).unwrap()) / (2.0 * h);
                assert!(
                    (jac[i] - fd).abs().max() < 1e-7,
                    "component {i} mismatch at {w:?}"
                );
            }
        }
    }

    #[test]
    fn canonicalize_wraps_large_angles() {
        let w = Vector3::new(0.0, 0.0, 1.5 * std::f64::consts::PI);
        let c = canonicalize(&w);
        assert!(c.norm() <= std::f64::consts::PI + 1e-12);
        // Same rotation either way.
        let (r1, r2) = (rodrigues(&w).unwrap(), rodrigues(&c).unwrap());
        assert!((r1 - r2).abs().max() < 1e-12);
        // Small vectors pass through untouched.
        let small = Vector3::new(0.1, -0.2, 0.3);
        assert_eq!(canonicalize(&small), small);
    }
}
