//! Keyframe selection by displacement and accumulation of 2D clouds into
//! a local environment map.

use crate::cloud::{self, Frame, PointCloud2D};
use crate::geometry::Point2D;
use crate::scalar::Real;
use nalgebra::Vector2;
use thiserror::Error;

/// Keyframe admission band, meters: below it the view barely moved,
/// above it the frame is suspect (blur, bad alignment).
pub const KEYFRAME_MIN_DISPLACEMENT: f64 = 0.01;
pub const KEYFRAME_MAX_DISPLACEMENT: f64 = 0.05;

/// A frame admitted to the map: camera pose at capture plus its
/// ground-frame cloud, stored in map coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Keyframe<T> {
    pub pose: Vector2<T>,
    pub cloud: PointCloud2D<T>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("keyframes must carry a non-empty cloud")]
    EmptyCloud,
    #[error("keyframe clouds must be in the ground frame")]
    WrongFrame,
}

/// True iff the displacement falls inside the keyframe admission band
/// (inclusive bounds).
pub fn select_keyframe<T: Real>(displacement_since_last: T, min: T, max: T) -> bool {
    displacement_since_last >= min && displacement_since_last <= max
}

/// Append-only local 2D point-cloud map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Map2D<T> {
    keyframes: Vec<Keyframe<T>>,
}

impl<T: Real> Map2D<T> {
    pub fn new() -> Self {
        Self {
            keyframes: Vec::new(),
        }
    }

    pub fn keyframes(&self) -> &[Keyframe<T>] {
        &self.keyframes
    }

    pub fn len(&self) -> usize {
        self.keyframes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keyframes.is_empty()
    }

    /// Total number of map points across all keyframes.
    pub fn point_count(&self) -> usize {
        self.keyframes.iter().map(|k| k.cloud.len()).sum()
    }

    /// Append a keyframe. The cloud is camera-centered in the ground
    /// frame; it is translated by `pose` into map coordinates here.
    pub fn add_keyframe(
        &mut self,
        pose: Vector2<T>,
        local_cloud: &PointCloud2D<T>,
    ) -> Result<(), MapError> {
        if local_cloud.is_empty() {
            return Err(MapError::EmptyCloud);
        }
        if local_cloud.frame != Frame::Ground {
            return Err(MapError::WrongFrame);
        }
        let points = local_cloud
            .points
            .iter()
            .map(|p| Point2D::new(p.x + pose.x, p.z + pose.y))
            .collect();
        self.keyframes.push(Keyframe {
            pose,
            cloud: PointCloud2D::new(points, local_cloud.timestamp, Frame::Ground),
        });
        Ok(())
    }

    /// Flatten the map into one cloud, keyframe order preserved.
    pub fn union_cloud(&self) -> PointCloud2D<T> {
        let points = self
            .keyframes
            .iter()
            .flat_map(|k| k.cloud.points.iter().copied())
            .collect();
        let t = self.keyframes.last().map_or(0.0, |k| k.cloud.timestamp);
        PointCloud2D::new(points, t, Frame::Ground)
    }

    /// Smoothed union cloud for display/export.
    pub fn smoothed(&self, k: usize) -> PointCloud2D<T> {
        cloud::smooth_knn(&self.union_cloud(), k)
    }
}
