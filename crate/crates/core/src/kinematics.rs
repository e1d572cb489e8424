//! Prosthesis link model and planar forward kinematics.
//!
//! The base is the knee joint (coincident with the camera up to a
//! configurable rigid offset); the shank hangs from it and the foot is a
//! bent linkage with a constant angle. Shank direction is measured from
//! straight-down, positive toward forward flexion.

use crate::geometry::Point2D;
use crate::scalar::{lit, Real};
use nalgebra::Vector2;

/// Link geometry; all lengths in meters, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProsthesisModel<T> {
    /// Knee to ankle.
    pub shank_length: T,
    pub ankle_to_toe: T,
    pub ankle_to_heel: T,
    /// Constant angle of the bent foot linkage; `π/2` keeps the sole
    /// horizontal at the neutral pose.
    pub foot_bend: T,
    /// Rigid camera-to-knee offset in the ground frame; zero when the
    /// camera sits on the knee axis.
    pub knee_offset: Vector2<T>,
}

impl<T: Real> Default for ProsthesisModel<T> {
    fn default() -> Self {
        Self {
            shank_length: lit(0.45),
            ankle_to_toe: lit(0.15),
            ankle_to_heel: lit(0.07),
            foot_bend: T::frac_pi_2(),
            knee_offset: Vector2::zeros(),
        }
    }
}

impl<T: Real> ProsthesisModel<T> {
    pub fn is_valid(&self) -> bool {
        self.shank_length > T::zero()
            && self.ankle_to_toe > T::zero()
            && self.ankle_to_heel > T::zero()
    }
}

/// Joint angles from the thigh device and the two encoders; radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointReading<T> {
    pub timestamp: f64,
    /// Thigh vs the coronal plane.
    pub thigh_angle: T,
    /// Knee clockwise rotation (encoder).
    pub theta1: T,
    /// Ankle clockwise rotation (encoder).
    pub theta2: T,
}

impl<T: Real> JointReading<T> {
    pub fn neutral(timestamp: f64) -> Self {
        Self {
            timestamp,
            thigh_angle: T::zero(),
            theta1: T::zero(),
            theta2: T::zero(),
        }
    }
}

/// Resolved joint positions in the ground frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPose<T> {
    pub knee: Point2D<T>,
    pub ankle: Point2D<T>,
    pub heel: Point2D<T>,
    pub toe: Point2D<T>,
    pub timestamp: f64,
}

/// Resolve ankle, heel, and toe from the estimated base position and the
/// current joint reading.
///
/// Angle chaining: shank angle `α = thigh_angle − θ₁` (from straight
/// down, positive forward), foot segment direction `φ = α − θ₂ +
/// foot_bend`; the heel extends opposite the toe.
pub fn forward_kinematics<T: Real>(
    base: Point2D<T>,
    joints: &JointReading<T>,
    model: &ProsthesisModel<T>,
) -> LegPose<T> {
    let knee = base.translated(model.knee_offset);
    let alpha = joints.thigh_angle - joints.theta1;
    let shank_dir = Vector2::new(alpha.sin(), -alpha.cos());
    let ankle = knee.translated(shank_dir * model.shank_length);
    let phi = alpha - joints.theta2 + model.foot_bend;
    let foot_dir = Vector2::new(phi.sin(), -phi.cos());
    let toe = ankle.translated(foot_dir * model.ankle_to_toe);
    let heel = ankle.translated(-foot_dir * model.ankle_to_heel);
    LegPose {
        knee,
        ankle,
        heel,
        toe,
        timestamp: joints.timestamp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation2;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn model() -> ProsthesisModel<f64> {
        ProsthesisModel::default()
    }

    /// Independent oracle built from nalgebra rotation matrices acting on
    /// the straight-down unit vector, instead of hand-written sin/cos.
    fn oracle_pose(base: Point2D<f64>, j: &JointReading<f64>, m: &ProsthesisModel<f64>) -> LegPose<f64> {
        let down = nalgebra::Vector2::new(0.0, -1.0);
        let alpha = j.thigh_angle - j.theta1;
        let phi = alpha - j.theta2 + m.foot_bend;
        // A positive shank angle leans forward (+x): a counter-clockwise
        // turn of the down vector in (x, z) coordinates.
        let shank = Rotation2::new(alpha) * down;
        let foot = Rotation2::new(phi) * down;
        let knee = nalgebra::Vector2::new(base.x, base.z) + m.knee_offset;
        let ankle = knee + shank * m.shank_length;
        let toe = ankle + foot * m.ankle_to_toe;
        let heel = ankle - foot * m.ankle_to_heel;
        LegPose {
            knee: Point2D::new(knee.x, knee.y),
            ankle: Point2D::new(ankle.x, ankle.y),
            heel: Point2D::new(heel.x, heel.y),
            toe: Point2D::new(toe.x, toe.y),
            timestamp: j.timestamp,
        }
    }

    #[test]
    fn straight_leg_canonical_pose() {
        let pose = forward_kinematics(
            Point2D::new(1.0, 2.0),
            &JointReading::neutral(0.0),
            &model(),
        );
        assert!((pose.ankle.x - 1.0).abs() < 1e-12);
        assert!((pose.ankle.z - (2.0 - 0.45)).abs() < 1e-12);
        assert!((pose.toe.x - (1.0 + 0.15)).abs() < 1e-12);
        assert!((pose.toe.z - pose.ankle.z).abs() < 1e-12);
        assert!((pose.heel.x - (1.0 - 0.07)).abs() < 1e-12);
    }

    #[test]
    fn toe_heel_distance_is_pose_independent() {
        let m = model();
        let expected = m.ankle_to_toe + m.ankle_to_heel;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let j = JointReading {
                timestamp: 0.0,
                thigh_angle: rng.random_range(-1.5..1.5),
                theta1: rng.random_range(-1.5..1.5),
                theta2: rng.random_range(-1.5..1.5),
            };
            let pose = forward_kinematics(Point2D::new(0.0, 0.0), &j, &m);
            assert!((pose.toe.distance(pose.heel) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_the_independent_rotation_matrix_oracle() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let base = Point2D::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let j = JointReading {
                timestamp: 0.0,
                thigh_angle: rng.random_range(-3.0..3.0),
                theta1: rng.random_range(-3.0..3.0),
                theta2: rng.random_range(-3.0..3.0),
            };
            let a = forward_kinematics(base, &j, &m);
            let b = oracle_pose(base, &j, &m);
            for (p, q) in [(a.knee, b.knee), (a.ankle, b.ankle), (a.heel, b.heel), (a.toe, b.toe)] {
                assert!((p.x - q.x).abs() < 1e-12 && (p.z - q.z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn link_lengths_are_preserved_over_random_configurations() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let j = JointReading {
                timestamp: 0.0,
                thigh_angle: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                theta1: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                theta2: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            };
            let pose = forward_kinematics(Point2D::new(0.3, 0.9), &j, &m);
            assert!((pose.knee.distance(pose.ankle) - m.shank_length).abs() < 1e-9);
            assert!((pose.ankle.distance(pose.toe) - m.ankle_to_toe).abs() < 1e-9);
            assert!((pose.ankle.distance(pose.heel) - m.ankle_to_heel).abs() < 1e-9);
        }
    }

    #[test]
    fn small_angle_perturbations_move_points_continuously() {
        let m = model();
        let j = JointReading {
            timestamp: 0.0,
            thigh_angle: 0.4,
            theta1: 0.2,
            theta2: -0.1,
        };
        let base = Point2D::new(0.0, 1.0);
        let a = forward_kinematics(base, &j, &m);
        for field in 0..3 {
            let mut jp = j;
            match field {
                0 => jp.thigh_angle += 1e-6,
                1 => jp.theta1 += 1e-6,
                _ => jp.theta2 += 1e-6,
            }
            let b = forward_kinematics(base, &jp, &m);
            for (p, q) in [(a.knee, b.knee), (a.ankle, b.ankle), (a.heel, b.heel), (a.toe, b.toe)] {
                assert!(p.distance(q) < 1e-5);
            }
        }
    }

    #[test]
    fn translating_the_base_translates_every_point() {
        let m = model();
        let j = JointReading {
            timestamp: 0.0,
            thigh_angle: 0.7,
            theta1: -0.3,
            theta2: 0.2,
        };
        let a = forward_kinematics(Point2D::new(0.0, 0.0), &j, &m);
        let b = forward_kinematics(Point2D::new(1.5, -0.25), &j, &m);
        for (p, q) in [(a.knee, b.knee), (a.ankle, b.ankle), (a.heel, b.heel), (a.toe, b.toe)] {
            assert!((q.x - p.x - 1.5).abs() < 1e-12);
            assert!((q.z - p.z + 0.25).abs() < 1e-12);
        }
    }
}
