//! Run configuration: every tunable of the estimation pipeline with
//! defaults matching the reference constants.

use crate::eskf::{InitialCovariance, NoiseParams};
use crate::kinematics::ProsthesisModel;
use crate::terrain::FeatureParams;
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid config: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    /// Sagittal slab half-width, meters.
    pub half_width: f64,
    /// Neighbors for kNN smoothing.
    pub knn_k: usize,
    /// Sagittal clouds above this size are uniformly subsampled.
    pub downsample_cap: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            half_width: 0.05,
            knn_k: 8,
            downsample_cap: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Feature box half-height (z), meters.
    pub d: f64,
    /// Feature box half-width (x), meters.
    pub w: f64,
    /// Corner association gate, meters.
    pub association_gate: f64,
    pub ransac_inlier_tol: f64,
    pub ransac_iterations: usize,
    pub ransac_min_consensus: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            d: 0.02,
            w: 0.05,
            association_gate: 0.10,
            ransac_inlier_tol: 0.01,
            ransac_iterations: 200,
            ransac_min_consensus: 10,
        }
    }
}

impl FeatureConfig {
    pub fn feature_params(&self) -> FeatureParams<f64> {
        FeatureParams {
            d: self.d,
            w: self.w,
            inlier_tol: self.ransac_inlier_tol,
            iterations: self.ransac_iterations,
            min_consensus: self.ransac_min_consensus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IcpConfig {
    /// Convergence threshold on the increment magnitude, meters.
    pub t_th: f64,
    pub max_iterations: usize,
}

impl Default for IcpConfig {
    fn default() -> Self {
        Self {
            t_th: 1e-6,
            max_iterations: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EskfConfig {
    pub sigma_a: f64,
    pub sigma_ab: f64,
    pub meas_std: f64,
    pub p0_position: f64,
    pub p0_velocity: f64,
    pub p0_accel_bias: f64,
    pub p0_gravity: f64,
    /// Cap on one integration step, seconds.
    pub max_dt: f64,
    /// Seconds without a visual update before the estimate counts as stale.
    pub staleness_window: f64,
}

impl Default for EskfConfig {
    fn default() -> Self {
        Self {
            sigma_a: 0.05,
            sigma_ab: 0.005,
            meas_std: 0.01,
            p0_position: 1e-4,
            p0_velocity: 1e-2,
            p0_accel_bias: 1e-2,
            p0_gravity: 1e-4,
            max_dt: 0.1,
            staleness_window: 1.0,
        }
    }
}

impl EskfConfig {
    pub fn noise_params(&self) -> NoiseParams<f64> {
        NoiseParams {
            sigma_a: self.sigma_a,
            sigma_ab: self.sigma_ab,
            meas_std: self.meas_std,
        }
    }

    pub fn initial_covariance(&self) -> InitialCovariance<f64> {
        InitialCovariance {
            position: self.p0_position,
            velocity: self.p0_velocity,
            accel_bias: self.p0_accel_bias,
            gravity: self.p0_gravity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProsthesisConfig {
    pub shank_length: f64,
    pub ankle_to_toe: f64,
    pub ankle_to_heel: f64,
    pub foot_bend: f64,
    /// Rigid camera-to-knee offset `[x, z]`, meters.
    pub knee_offset: [f64; 2],
}

impl Default for ProsthesisConfig {
    fn default() -> Self {
        Self {
            shank_length: 0.45,
            ankle_to_toe: 0.15,
            ankle_to_heel: 0.07,
            foot_bend: std::f64::consts::FRAC_PI_2,
            knee_offset: [0.0, 0.0],
        }
    }
}

impl ProsthesisConfig {
    pub fn model(&self) -> ProsthesisModel<f64> {
        ProsthesisModel {
            shank_length: self.shank_length,
            ankle_to_toe: self.ankle_to_toe,
            ankle_to_heel: self.ankle_to_heel,
            foot_bend: self.foot_bend,
            knee_offset: Vector2::new(self.knee_offset[0], self.knee_offset[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KeyframeConfig {
    pub min_displacement: f64,
    pub max_displacement: f64,
}

impl Default for KeyframeConfig {
    fn default() -> Self {
        Self {
            min_displacement: 0.01,
            max_displacement: 0.05,
        }
    }
}

/// All pipeline tunables. Every random choice downstream derives from
/// `seed`, so identical config + dataset give identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub preprocess: PreprocessConfig,
    pub features: FeatureConfig,
    pub icp: IcpConfig,
    pub eskf: EskfConfig,
    pub prosthesis: ProsthesisConfig,
    pub keyframe: KeyframeConfig,
    /// Disable to run inertial-only (dead reckoning) for comparisons.
    pub use_visual: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            preprocess: PreprocessConfig::default(),
            features: FeatureConfig::default(),
            icp: IcpConfig::default(),
            eskf: EskfConfig::default(),
            prosthesis: ProsthesisConfig::default(),
            keyframe: KeyframeConfig::default(),
            use_visual: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("preprocess.half_width", self.preprocess.half_width),
            ("features.d", self.features.d),
            ("features.w", self.features.w),
            ("features.association_gate", self.features.association_gate),
            ("features.ransac_inlier_tol", self.features.ransac_inlier_tol),
            ("icp.t_th", self.icp.t_th),
            ("eskf.sigma_a", self.eskf.sigma_a),
            ("eskf.sigma_ab", self.eskf.sigma_ab),
            ("eskf.meas_std", self.eskf.meas_std),
            ("eskf.max_dt", self.eskf.max_dt),
            ("prosthesis.shank_length", self.prosthesis.shank_length),
            ("prosthesis.ankle_to_toe", self.prosthesis.ankle_to_toe),
            ("prosthesis.ankle_to_heel", self.prosthesis.ankle_to_heel),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        if self.preprocess.knn_k == 0 {
            return Err(ConfigError("preprocess.knn_k must be at least 1".into()));
        }
        if self.preprocess.downsample_cap == 0 {
            return Err(ConfigError("preprocess.downsample_cap must be positive".into()));
        }
        if self.icp.max_iterations == 0 {
            return Err(ConfigError("icp.max_iterations must be at least 1".into()));
        }
        if self.features.ransac_iterations == 0 {
            return Err(ConfigError("features.ransac_iterations must be positive".into()));
        }
        if self.keyframe.min_displacement < 0.0
            || self.keyframe.max_displacement < self.keyframe.min_displacement
        {
            return Err(ConfigError(
                "keyframe displacement band must satisfy 0 <= min <= max".into(),
            ));
        }
        Ok(())
    }
}
