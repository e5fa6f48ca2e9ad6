//! Rigid/affine 3-D transforms stored as a 3x3 linear part plus translation.

use nalgebra::{Matrix3, Matrix4, Point3, Vector3};

/// An affine map `x -> linear * x + translation`.
///
/// Joint transforms are rigid; per-vertex blended skinning transforms are
/// general affine (convex blends of rigid maps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine3 {
    pub linear: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Affine3 {
    pub fn identity() -> Self {
        Affine3 {
            linear: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(linear: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Affine3 {
            linear,
            translation,
        }
    }

    /// `self` applied after `other`: `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Affine3) -> Affine3 {
        Affine3 {
            linear: self.linear * other.linear,
            translation: self.linear * other.translation + self.translation,
        }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.linear * p.coords + self.translation)
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.linear * v
    }

    /// Inverse, or `None` for a singular linear part.
    pub fn inverse(&self) -> Option<Affine3> {
        let inv = self.linear.try_inverse()?;
        Some(Affine3 {
            linear: inv,
            translation: -(inv * self.translation),
        })
    }

    /// Ratio of largest to smallest singular value of the linear part.
    pub fn condition_number(&self) -> f64 {
        let svd = self.linear.svd(false, false);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.linear);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}

impl Default for Affine3 {
    fn default() -> Self {
        Self::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::rodrigues;
    use approx::assert_relative_eq;

    #[test]
    fn compose_matches_homogeneous_product() {
        let a = Affine3::new(
            rodrigues(&Vector3::new(0.3, -0.2, 0.5)).unwrap(),
            Vector3::new(1.0, 2.0, 3.0),
        );
        let b = Affine3::new(
            rodrigues(&Vector3::new(-0.1, 0.7, 0.2)).unwrap(),
            Vector3::new(-4.0, 0.5, 2.0),
        );
        let c = a.compose(&b);
        let m = a.to_homogeneous() * b.to_homogeneous();
        assert!((c.to_homogeneous() - m).abs().max() < 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        let a = Affine3::new(
            rodrigues(&Vector3::new(0.4, 0.1, -0.9)).unwrap(),
            Vector3::new(5.0, -2.0, 0.25),
        );
        let inv = a.inverse().unwrap();
        let p = Point3::new(1.5, -0.5, 2.0);
        let q = inv.apply(&a.apply(&p));
        assert_relative_eq!(q.coords, p.coords, epsilon = 1e-12);
    }

    #[test]
    fn condition_number_of_rotation_is_one() {
        let a = Affine3::new(
            rodrigues(&Vector3::new(0.2, 0.3, 0.4)).unwrap(),
            Vector3::zeros(),
        );
        assert_relative_eq!(a.condition_number(), 1.0, epsilon = 1e-10);
        let singular = Affine3::new(Matrix3::zeros(), Vector3::zeros());
        assert!(singular.condition_number().is_infinite());
    }
}
