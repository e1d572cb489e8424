//! Ground-truth gait synthesis: a C¹ toe trajectory built from cycloidal
//! swing segments between footholds, smooth joint-angle profiles, and the
//! knee/camera trajectory derived from them, with closed-form
//! accelerations for IMU synthesis.

use super::terrain::{Terrain, TerrainSpec, FEATURE_ONSET};
use super::SimError;
use crate::geometry::Point2D;
use crate::kinematics::{JointReading, ProsthesisModel};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

/// Sensor rates and noise for a simulated walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaitSpec {
    /// Full stride period (stance + swing), seconds.
    pub stride_duration: f64,
    /// Minimum vertical margin of the toe over every step nose, meters.
    pub step_clearance: f64,
    pub camera_fps: f64,
    pub imu_rate: f64,
    /// Gaussian range noise of the depth sensor, meters.
    pub depth_noise_std: f64,
    pub rng_seed: u64,
}

impl Default for GaitSpec {
    fn default() -> Self {
        Self {
            stride_duration: 1.0,
            step_clearance: 0.02,
            camera_fps: 30.0,
            imu_rate: 100.0,
            depth_noise_std: 0.005,
            rng_seed: 7,
        }
    }
}

/// Shaping knobs for the synthetic gait; the defaults produce a
/// plausible stair/obstacle walk and are rarely worth touching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaitShape {
    /// Fraction of the stride spent standing still.
    pub stance_fraction: f64,
    /// Standing time before the first stride, seconds.
    pub lead_in: f64,
    /// Standing time after the last stride, seconds.
    pub tail: f64,
    /// Joint oscillation amplitudes, radians.
    pub thigh_amp: f64,
    pub knee_amp: f64,
    pub ankle_amp: f64,
    /// Camera pitch oscillation amplitude, radians.
    pub pitch_amp: f64,
    /// How far the toe lands behind the next step nose, meters.
    pub toe_setback: f64,
    /// Stride length on level ground, meters.
    pub flat_stride: f64,
    /// Number of strides on flat terrain (stairs/obstacle derive it
    /// from the geometry).
    pub flat_stride_count: usize,
}

impl Default for GaitShape {
    fn default() -> Self {
        Self {
            stance_fraction: 0.35,
            lead_in: 0.5,
            tail: 0.5,
            thigh_amp: 0.20,
            knee_amp: 0.30,
            ankle_amp: 0.10,
            pitch_amp: 0.12,
            toe_setback: 0.03,
            flat_stride: 0.40,
            flat_stride_count: 4,
        }
    }
}

/// Cycloid ramp: s(0) = 0, s(1) = 1, zero slope at both ends.
fn cyc(w: f64) -> f64 {
    w - (2.0 * std::f64::consts::PI * w).sin() / (2.0 * std::f64::consts::PI)
}

fn cyc_d1(w: f64) -> f64 {
    1.0 - (2.0 * std::f64::consts::PI * w).cos()
}

fn cyc_d2(w: f64) -> f64 {
    2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * w).sin()
}

/// Value/first/second derivative triple of a scalar profile in u.
#[derive(Debug, Clone, Copy)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

impl Jet {
    const ZERO: Jet = Jet { v: 0.0, d1: 0.0, d2: 0.0 };

    fn scale(self, a: f64) -> Jet {
        Jet { v: a * self.v, d1: a * self.d1, d2: a * self.d2 }
    }

    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

/// Vertical riser progress: completes in the first half of the swing.
fn vertical_ramp(u: f64) -> Jet {
    if u < 0.5 {
        Jet { v: cyc(2.0 * u), d1: 2.0 * cyc_d1(2.0 * u), d2: 4.0 * cyc_d2(2.0 * u) }
    } else {
        Jet { v: 1.0, d1: 0.0, d2: 0.0 }
    }
}

/// Horizontal advance: runs in the second half of the swing.
fn horizontal_ramp(u: f64) -> Jet {
    if u <= 0.5 {
        Jet::ZERO
    } else {
        let w = 2.0 * u - 1.0;
        Jet { v: cyc(w), d1: 2.0 * cyc_d1(w), d2: 4.0 * cyc_d2(w) }
    }
}

/// Clearance bump `sin²(πu)`: zero with zero slope at both ends.
fn bump(u: f64) -> Jet {
    let pi = std::f64::consts::PI;
    Jet {
        v: (pi * u).sin().powi(2),
        d1: pi * (2.0 * pi * u).sin(),
        d2: 2.0 * pi * pi * (2.0 * pi * u).cos(),
    }
}

/// Cycloid-phased oscillation `sin(2π s(u))`: one full cycle per swing,
/// zero value and slope at both ends.
fn swing_wave(u: f64) -> Jet {
    let tau = 2.0 * std::f64::consts::PI;
    let s = cyc(u);
    let (sv, cv) = (tau * s).sin_cos();
    Jet {
        v: sv,
        d1: tau * cv * cyc_d1(u),
        d2: -tau * tau * sv * cyc_d1(u).powi(2) + tau * cv * cyc_d2(u),
    }
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    Stance(usize),
    Swing { stride: usize, u: f64, du_dt: f64 },
}

/// Analytic ground-truth trajectory of the toe, joints, knee/camera, and
/// camera pitch for one walk over a terrain.
#[derive(Debug, Clone)]
pub struct GaitTrajectory {
    footholds: Vec<Point2D<f64>>,
    lift: f64,
    spec: GaitSpec,
    shape: GaitShape,
    model: ProsthesisModel<f64>,
}

impl GaitTrajectory {
    pub fn new(
        terrain: &Terrain,
        spec: &GaitSpec,
        shape: &GaitShape,
        model: &ProsthesisModel<f64>,
    ) -> Result<Self, SimError> {
        if spec.camera_fps <= 0.0 || spec.imu_rate <= 0.0 || spec.stride_duration <= 0.0 {
            return Err(SimError::InvalidTerrain(
                "gait rates and stride duration must be positive".into(),
            ));
        }
        let heel_reach = model.ankle_to_toe + model.ankle_to_heel;
        let (footholds, lift) = match terrain.spec {
            TerrainSpec::Flat => {
                let n = shape.flat_stride_count;
                let start = 0.2;
                let fh = (0..=n)
                    .map(|k| Point2D::new(start + k as f64 * shape.flat_stride, 0.0))
                    .collect();
                (fh, spec.step_clearance + 0.05)
            }
            TerrainSpec::Stairs { riser, tread, n_steps } => {
                let fh = (0..n_steps)
                    .map(|k| {
                        Point2D::new(
                            k as f64 * tread + (tread - shape.toe_setback),
                            k as f64 * riser,
                        )
                    })
                    .collect();
                (fh, spec.step_clearance + 0.05)
            }
            TerrainSpec::Obstacle { height, width } => {
                let before = FEATURE_ONSET - shape.toe_setback;
                // The crossing stride must land the heel past the far edge.
                let landing = (before + shape.flat_stride)
                    .max(FEATURE_ONSET + width + heel_reach + 0.04);
                let fh = vec![
                    Point2D::new(before - shape.flat_stride, 0.0),
                    Point2D::new(before, 0.0),
                    Point2D::new(landing, 0.0),
                    Point2D::new(landing + shape.flat_stride, 0.0),
                ];
                (fh, height + spec.step_clearance + 0.16)
            }
        };
        Ok(Self {
            footholds,
            lift,
            spec: *spec,
            shape: *shape,
            model: *model,
        })
    }

    pub fn footholds(&self) -> &[Point2D<f64>] {
        &self.footholds
    }

    pub fn strides(&self) -> usize {
        self.footholds.len().saturating_sub(1)
    }

    pub fn duration(&self) -> f64 {
        self.shape.lead_in + self.strides() as f64 * self.spec.stride_duration + self.shape.tail
    }

    fn phase(&self, t: f64) -> Phase {
        let n = self.strides();
        if n == 0 || t < self.shape.lead_in {
            return Phase::Stance(0);
        }
        let rel = t - self.shape.lead_in;
        let stride = (rel / self.spec.stride_duration).floor() as usize;
        if stride >= n {
            return Phase::Stance(n);
        }
        let tau = rel / self.spec.stride_duration - stride as f64;
        let sf = self.shape.stance_fraction;
        if tau < sf {
            Phase::Stance(stride)
        } else {
            let swing_time = (1.0 - sf) * self.spec.stride_duration;
            Phase::Swing {
                stride,
                u: (tau - sf) / (1.0 - sf),
                du_dt: 1.0 / swing_time,
            }
        }
    }

    /// Toe position, velocity, and acceleration in world coordinates.
    pub fn toe_state(&self, t: f64) -> (Point2D<f64>, Vector2<f64>, Vector2<f64>) {
        match self.phase(t) {
            Phase::Stance(i) => (self.footholds[i], Vector2::zeros(), Vector2::zeros()),
            Phase::Swing { stride, u, du_dt } => {
                let a = self.footholds[stride];
                let b = self.footholds[stride + 1];
                let (dx, dz) = (b.x - a.x, b.z - a.z);
                let h = horizontal_ramp(u).scale(dx);
                let v = vertical_ramp(u).scale(dz);
                let l = bump(u).scale(self.lift);
                let pos = Point2D::new(a.x + h.v, a.z + v.v + l.v);
                let vel = Vector2::new(h.d1, v.d1 + l.d1) * du_dt;
                let acc = Vector2::new(h.d2, v.d2 + l.d2) * du_dt * du_dt;
                (pos, vel, acc)
            }
        }
    }

    fn joint_jets(&self, t: f64) -> (Jet, Jet, Jet, f64) {
        match self.phase(t) {
            Phase::Stance(_) => (Jet::ZERO, Jet::ZERO, Jet::ZERO, 0.0),
            Phase::Swing { u, du_dt, .. } => {
                let wave = swing_wave(u);
                let b = bump(u);
                (
                    wave.scale(self.shape.thigh_amp),
                    b.scale(self.shape.knee_amp),
                    wave.scale(self.shape.ankle_amp),
                    du_dt,
                )
            }
        }
    }

    /// Encoder/thigh joint angles at time `t`.
    pub fn joints(&self, t: f64) -> JointReading<f64> {
        let (thigh, theta1, theta2, _) = self.joint_jets(t);
        JointReading {
            timestamp: t,
            thigh_angle: thigh.v,
            theta1: theta1.v,
            theta2: theta2.v,
        }
    }

    /// Camera pitch oscillation (forward lean during the swing).
    pub fn pitch_osc(&self, t: f64) -> f64 {
        match self.phase(t) {
            Phase::Stance(_) => 0.0,
            Phase::Swing { u, .. } => self.shape.pitch_amp * swing_wave(u).v,
        }
    }

    /// Knee-to-toe offset and its first two derivatives w.r.t. u.
    fn offset_jets(&self, t: f64) -> (Vector2<f64>, Vector2<f64>, Vector2<f64>, f64) {
        let (thigh, theta1, theta2, du_dt) = self.joint_jets(t);
        let alpha = thigh.sub(theta1);
        let phi = alpha.sub(theta2);
        let fb = self.model.foot_bend;
        let (l1, l2) = (self.model.shank_length, self.model.ankle_to_toe);

        let dir = |a: f64| Vector2::new(a.sin(), -a.cos());
        let dir_d = |a: f64| Vector2::new(a.cos(), a.sin());

        let off = dir(alpha.v) * l1 + dir(phi.v + fb) * l2;
        let off_d1 = dir_d(alpha.v) * (l1 * alpha.d1) + dir_d(phi.v + fb) * (l2 * phi.d1);
        let off_d2 = (dir_d(alpha.v) * alpha.d2 - dir(alpha.v) * (alpha.d1 * alpha.d1)) * l1
            + (dir_d(phi.v + fb) * phi.d2 - dir(phi.v + fb) * (phi.d1 * phi.d1)) * l2;
        (off, off_d1, off_d2, du_dt)
    }

    /// Knee (= camera) world position.
    pub fn knee_position(&self, t: f64) -> Point2D<f64> {
        let (toe, _, _) = self.toe_state(t);
        let (off, _, _, _) = self.offset_jets(t);
        Point2D::new(toe.x - off.x, toe.z - off.y)
    }

    /// Analytic world acceleration of the knee, m/s².
    pub fn knee_acceleration(&self, t: f64) -> Vector2<f64> {
        let (_, _, toe_acc) = self.toe_state(t);
        let (_, _, off_d2, du_dt) = self.offset_jets(t);
        toe_acc - off_d2 * (du_dt * du_dt)
    }
}

/// Ground-truth streams sampled at the camera and IMU rates.
#[derive(Debug, Clone)]
pub struct GaitTruth {
    pub frame_times: Vec<f64>,
    pub knee_frames: Vec<Point2D<f64>>,
    pub toe_frames: Vec<Point2D<f64>>,
    pub joints_frames: Vec<JointReading<f64>>,
    /// Camera pitch oscillation per frame (mount angle excluded).
    pub pitch_frames: Vec<f64>,
    pub imu_times: Vec<f64>,
    pub knee_accel_imu: Vec<Vector2<f64>>,
    pub pitch_imu: Vec<f64>,
}

/// Sample the analytic trajectory at both sensor rates.
pub fn gen_gait(trajectory: &GaitTrajectory) -> GaitTruth {
    let duration = trajectory.duration();
    let spec = trajectory.spec;
    let n_frames = (duration * spec.camera_fps).floor() as usize + 1;
    let n_imu = (duration * spec.imu_rate).floor() as usize + 1;
    let frame_times: Vec<f64> = (0..n_frames).map(|k| k as f64 / spec.camera_fps).collect();
    let imu_times: Vec<f64> = (0..n_imu).map(|k| k as f64 / spec.imu_rate).collect();
    GaitTruth {
        knee_frames: frame_times.iter().map(|&t| trajectory.knee_position(t)).collect(),
        toe_frames: frame_times.iter().map(|&t| trajectory.toe_state(t).0).collect(),
        joints_frames: frame_times.iter().map(|&t| trajectory.joints(t)).collect(),
        pitch_frames: frame_times.iter().map(|&t| trajectory.pitch_osc(t)).collect(),
        knee_accel_imu: imu_times
            .iter()
            .map(|&t| trajectory.knee_acceleration(t))
            .collect(),
        pitch_imu: imu_times.iter().map(|&t| trajectory.pitch_osc(t)).collect(),
        frame_times,
        imu_times,
    }
}
