//! Ray-cast depth rendering of the terrain profile.

use super::terrain::Terrain;
use super::SimError;
use crate::cloud::{Frame, PointCloud2D, PointCloud3D};
use crate::geometry::{Point2D, Point3D};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Depth camera geometry: field of view, angular resolution, and how the
/// optical axis is mounted relative to the ground when the knee is
/// neutral (negative = looking down-forward).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorRig {
    /// Field of view, radians, in (0, pi).
    pub fov: f64,
    /// Rays per frame.
    pub rays: usize,
    /// Mounting angle of the optical axis, radians.
    pub mount_angle: f64,
    /// Half-width of the synthetic lateral spread, meters.
    pub lateral_spread: f64,
}

impl Default for SensorRig {
    fn default() -> Self {
        Self {
            fov: 1.0,
            rays: 800,
            mount_angle: -std::f64::consts::FRAC_PI_4,
            lateral_spread: 0.04,
        }
    }
}

/// Cast `rays` against the terrain from `camera_pos` and return the hit
/// points in the camera frame with Gaussian range noise.
///
/// `camera_angle` is the full camera-to-ground rotation (mount angle
/// plus pitch oscillation); ray directions fan over `fov` around the
/// optical axis. Rays that miss are dropped; if every ray misses the
/// frame is unusable and `NoIntersections` is returned.
pub fn render_depth(
    terrain: &Terrain,
    camera_pos: Point2D<f64>,
    camera_angle: f64,
    fov: f64,
    rays: usize,
    noise_std: f64,
    timestamp: f64,
    seed: u64,
) -> Result<PointCloud2D<f64>, SimError> {
    if !(0.0..std::f64::consts::PI).contains(&fov) || fov == 0.0 {
        return Err(SimError::InvalidFov);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_std.max(0.0)).unwrap();
    let mut points = Vec::with_capacity(rays);
    for i in 0..rays {
        let offset = if rays == 1 {
            0.0
        } else {
            -fov / 2.0 + fov * i as f64 / (rays - 1) as f64
        };
        let world_angle = camera_angle + offset;
        let dir = (world_angle.cos(), world_angle.sin());
        if let Some(range) = terrain.raycast(camera_pos, dir) {
            let noisy = if noise_std > 0.0 {
                range + noise.sample(&mut rng)
            } else {
                range
            };
            // In the camera frame the ray direction is just the fan offset.
            points.push(Point2D::new(noisy * offset.cos(), noisy * offset.sin()));
        }
    }
    if points.is_empty() {
        return Err(SimError::NoIntersections);
    }
    Ok(PointCloud2D::new(points, timestamp, Frame::Camera))
}

/// Emulate the 3D input the sagittal projection expects by giving each
/// 2D camera-frame point a uniform lateral offset within `±spread`.
pub fn with_lateral_spread(
    cloud: &PointCloud2D<f64>,
    spread: f64,
    seed: u64,
) -> PointCloud3D<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = cloud
        .points
        .iter()
        .map(|p| {
            let y = if spread > 0.0 {
                rng.random_range(-spread..spread)
            } else {
                0.0
            };
            Point3D::new(p.x, y, p.z)
        })
        .collect();
    PointCloud3D::new(points, cloud.timestamp)
}
