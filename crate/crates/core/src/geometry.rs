//! Sagittal-plane geometry primitives: points and planar rotations.
//!
//! x points forward (walking direction), y lateral, z up. The sagittal
//! plane is the x–z plane; planar rotations act about the lateral axis,
//! counter-clockwise positive.

use crate::scalar::Real;
use nalgebra::{Matrix2, Vector2};

/// A raw depth-camera point in 3D (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3D<T> {
    /// Forward.
    pub x: T,
    /// Lateral.
    pub y: T,
    /// Up.
    pub z: T,
}

impl<T: Real> Point3D<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A sagittal-plane point (meters): x forward, z up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D<T> {
    pub x: T,
    pub z: T,
}

impl<T: Real> Point2D<T> {
    pub fn new(x: T, z: T) -> Self {
        Self { x, z }
    }

    pub fn to_vector(self) -> Vector2<T> {
        Vector2::new(self.x, self.z)
    }

    pub fn from_vector(v: Vector2<T>) -> Self {
        Self { x: v.x, z: v.y }
    }

    pub fn distance(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dz = self.z - other.z;
        (dx * dx + dz * dz).sqrt()
    }

    pub fn translated(self, d: Vector2<T>) -> Self {
        Self {
            x: self.x + d.x,
            z: self.z + d.y,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.z.is_finite()
    }
}

/// An element of SO(2) acting on the sagittal plane.
///
/// The angle is counter-clockwise about the lateral axis, so for a
/// positive quarter turn `(1, 0)` maps to `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation2D<T> {
    pub angle: T,
}

impl<T: Real> Rotation2D<T> {
    pub fn new(angle: T) -> Self {
        Self { angle }
    }

    pub fn identity() -> Self {
        Self { angle: T::zero() }
    }

    pub fn inverse(self) -> Self {
        Self { angle: -self.angle }
    }

    pub fn matrix(self) -> Matrix2<T> {
        let (s, c) = self.angle.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    pub fn apply(self, p: Point2D<T>) -> Point2D<T> {
        let (s, c) = self.angle.sin_cos();
        Point2D {
            x: c * p.x - s * p.z,
            z: s * p.x + c * p.z,
        }
    }

    pub fn apply_vector(self, v: Vector2<T>) -> Vector2<T> {
        let (s, c) = self.angle.sin_cos();
        Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn quarter_turn() {
        let r = Rotation2D::new(std::f64::consts::FRAC_PI_2);
        let p = r.apply(Point2D::new(1.0, 0.0));
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(p.z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn thirty_degree_pitch_matches_hand_computed_matrix_product() {
        // Independent oracle: [cos30 -sin30; sin30 cos30] * (1.0, 0.5)
        // evaluated by hand with cos30 = sqrt(3)/2.
        let r = Rotation2D::new(30f64.to_radians());
        let p = r.apply(Point2D::new(1.0, 0.5));
        assert_relative_eq!(p.x, 0.616_025_403_784_438_6, epsilon = 1e-12);
        assert_relative_eq!(p.z, 0.933_012_701_892_219_3, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn rotation_preserves_norm(angle in -10.0f64..10.0, x in -100.0f64..100.0, z in -100.0f64..100.0) {
            let r = Rotation2D::new(angle);
            let p = r.apply(Point2D::new(x, z));
            let before = (x * x + z * z).sqrt();
            let after = (p.x * p.x + p.z * p.z).sqrt();
            prop_assert!((before - after).abs() < 1e-12 * (1.0 + before));
        }

        #[test]
        fn rotation_round_trips_through_inverse(angle in -10.0f64..10.0, x in -10.0f64..10.0, z in -10.0f64..10.0) {
            let r = Rotation2D::new(angle);
            let p = r.inverse().apply(r.apply(Point2D::new(x, z)));
            prop_assert!((p.x - x).abs() < 1e-9);
            prop_assert!((p.z - z).abs() < 1e-9);
        }
    }
}
