//! Synthetic data source: terrain geometry, ground-truth gait
//! trajectories, ray-cast depth frames, and noisy IMU streams — a
//! desk-scale stand-in for hardware experiments.

mod dataset;
mod gait;
mod imu;
mod render;
mod terrain;

pub use dataset::{generate_dataset, DatasetSpec};
pub use gait::{gen_gait, GaitShape, GaitSpec, GaitTrajectory, GaitTruth};
pub use imu::simulate_imu;
pub use render::{render_depth, with_lateral_spread, SensorRig};
pub use terrain::{gen_terrain, Terrain, TerrainSpec};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid terrain dimensions: {0}")]
    InvalidTerrain(String),
    #[error("all rays missed the terrain")]
    NoIntersections,
    #[error("camera field of view must lie in (0, pi)")]
    InvalidFov,
}
