//! Sagittal-plane error-state Kalman filter (SP-ESKF).
//!
//! The filter tracks the 8-dimensional state (position, velocity,
//! accelerometer bias, gravity — two components each, sagittal plane).
//! IMU samples integrate the nominal state and propagate the error
//! covariance; chained visual position fixes correct the error state,
//! which is injected into the nominal state and reset to zero.

use crate::geometry::Rotation2D;
use crate::icp::IcpResult;
use crate::scalar::{lit, Real};
use nalgebra::{SMatrix, SVector, Vector2};
use thiserror::Error;

/// Standard gravity magnitude used for the initial gravity state.
pub const GRAVITY: f64 = 9.81;
/// Default cap on a single integration step; a larger gap means the
/// stream dropped samples.
pub const DEFAULT_MAX_DT: f64 = 0.1;
/// Default window after which the estimate counts as visually stale.
pub const DEFAULT_STALENESS_WINDOW: f64 = 1.0;

/// One accelerometer sample with the IMU-derived orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample<T> {
    /// Seconds; strictly increasing within a stream.
    pub timestamp: f64,
    /// Sagittal body-frame specific force, m/s².
    pub accel_body: Vector2<T>,
    /// Body-to-ground rotation from the device's Euler angles.
    pub rot: Rotation2D<T>,
}

/// Sensor noise densities; all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams<T> {
    /// Accelerometer white noise, m/s² per sample.
    pub sigma_a: T,
    /// Bias random-walk density, m/s² per √s.
    pub sigma_ab: T,
    /// Std of the visual position measurement, meters (diagonal of V).
    pub meas_std: T,
}

impl<T: Real> NoiseParams<T> {
    pub fn validate(&self) -> Result<(), EskfError> {
        if self.sigma_a > T::zero() && self.sigma_ab > T::zero() && self.meas_std > T::zero() {
            Ok(())
        } else {
            Err(EskfError::InvalidNoise)
        }
    }
}

/// Integrated nominal state (position, velocity, accel bias, gravity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NominalState<T> {
    pub position: Vector2<T>,
    pub velocity: Vector2<T>,
    pub accel_bias: Vector2<T>,
    pub gravity: Vector2<T>,
}

impl<T: Real> NominalState<T> {
    /// Start-of-run state: origin, at rest, zero bias, nominal gravity.
    pub fn initial() -> Self {
        Self {
            position: Vector2::zeros(),
            velocity: Vector2::zeros(),
            accel_bias: Vector2::zeros(),
            gravity: Vector2::new(T::zero(), lit(-GRAVITY)),
        }
    }
}

/// The 8-vector error state (δp, δv, δa_b, δg); zero between updates
/// and reset to exactly zero after every injection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState<T> {
    pub delta: SVector<T, 8>,
}

impl<T: Real> ErrorState<T> {
    pub fn zero() -> Self {
        Self {
            delta: SVector::zeros(),
        }
    }
}

/// Error-state covariance, kept symmetric after every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance<T> {
    matrix: SMatrix<T, 8, 8>,
}

impl<T: Real> Covariance<T> {
    pub fn from_matrix(matrix: SMatrix<T, 8, 8>) -> Self {
        let mut c = Self { matrix };
        c.symmetrize();
        c
    }

    pub fn as_matrix(&self) -> &SMatrix<T, 8, 8> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace()
    }

    fn symmetrize(&mut self) {
        let half: T = lit(0.5);
        self.matrix = (self.matrix + self.matrix.transpose()) * half;
    }
}

/// Diagonal of the initial error covariance, by state block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCovariance<T> {
    pub position: T,
    pub velocity: T,
    pub accel_bias: T,
    pub gravity: T,
}

impl<T: Real> Default for InitialCovariance<T> {
    /// Tight prior on position (the start pose defines the origin) and
    /// gravity, loose on velocity and bias.
    fn default() -> Self {
        Self {
            position: lit(1e-4),
            velocity: lit(1e-2),
            accel_bias: lit(1e-2),
            gravity: lit(1e-4),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EskfError {
    #[error("sample timestamp {got} is not after the filter time {last}")]
    NonMonotonicTime { last: f64, got: f64 },
    #[error("integration step {dt} s exceeds the cap {max} s (dropped samples?)")]
    ExcessiveDt { dt: f64, max: f64 },
    #[error("innovation covariance is numerically singular")]
    SingularInnovation,
    #[error("ICP result did not converge; no measurement formed")]
    NotConverged,
    #[error("noise parameters must be strictly positive")]
    InvalidNoise,
}

/// The SP-ESKF. Callers must serialize `predict`/`update` in timestamp
/// order; the filter is transferable between threads but not
/// concurrently mutable.
#[derive(Debug, Clone)]
pub struct Filter<T> {
    pub nominal: NominalState<T>,
    pub error: ErrorState<T>,
    pub covariance: Covariance<T>,
    pub noise: NoiseParams<T>,
    pub last_timestamp: f64,
    /// Time of the last accepted visual update, if any.
    pub last_update: Option<f64>,
    start_time: f64,
    max_dt: f64,
}

impl<T: Real> Filter<T> {
    pub fn new(
        noise: NoiseParams<T>,
        init: InitialCovariance<T>,
        start_time: f64,
    ) -> Result<Self, EskfError> {
        noise.validate()?;
        let mut p = SMatrix::<T, 8, 8>::zeros();
        for i in 0..2 {
            p[(i, i)] = init.position;
            p[(i + 2, i + 2)] = init.velocity;
            p[(i + 4, i + 4)] = init.accel_bias;
            p[(i + 6, i + 6)] = init.gravity;
        }
        Ok(Self {
            nominal: NominalState::initial(),
            error: ErrorState::zero(),
            covariance: Covariance::from_matrix(p),
            noise,
            last_timestamp: start_time,
            last_update: None,
            start_time,
            max_dt: DEFAULT_MAX_DT,
        })
    }

    pub fn with_max_dt(mut self, max_dt: f64) -> Self {
        self.max_dt = max_dt;
        self
    }

    /// Integrate one IMU sample: nominal-state kinematics plus error
    /// covariance propagation `P ← F_x P F_xᵀ + F_i Q F_iᵀ`.
    ///
    /// The propagated mean error stays zero between measurements, so
    /// only the covariance changes for the error state.
    pub fn predict(&mut self, sample: &ImuSample<T>) -> Result<(), EskfError> {
        let dt_f64 = sample.timestamp - self.last_timestamp;
        if dt_f64 <= 0.0 {
            return Err(EskfError::NonMonotonicTime {
                last: self.last_timestamp,
                got: sample.timestamp,
            });
        }
        if dt_f64 > self.max_dt {
            return Err(EskfError::ExcessiveDt {
                dt: dt_f64,
                max: self.max_dt,
            });
        }
        let dt: T = lit(dt_f64);
        let half: T = lit(0.5);

        let rot = sample.rot.matrix();
        let a_world = rot * (sample.accel_body - self.nominal.accel_bias) + self.nominal.gravity;
        self.nominal.position += self.nominal.velocity * dt + a_world * (half * dt * dt);
        self.nominal.velocity += a_world * dt;
        // Bias and gravity are constant under the motion model.

        let mut f_x = SMatrix::<T, 8, 8>::identity();
        let eye_dt = SMatrix::<T, 2, 2>::identity() * dt;
        f_x.fixed_view_mut::<2, 2>(0, 2).copy_from(&eye_dt);
        f_x.fixed_view_mut::<2, 2>(2, 4).copy_from(&(-rot * dt));
        f_x.fixed_view_mut::<2, 2>(2, 6).copy_from(&eye_dt);

        let mut p = f_x * self.covariance.as_matrix() * f_x.transpose();
        let q_accel = self.noise.sigma_a * self.noise.sigma_a * dt * dt;
        let q_bias = self.noise.sigma_ab * self.noise.sigma_ab * dt;
        for i in 2..4 {
            p[(i, i)] += q_accel;
        }
        for i in 4..6 {
            p[(i, i)] += q_bias;
        }
        self.covariance = Covariance::from_matrix(p);
        self.last_timestamp = sample.timestamp;
        Ok(())
    }

    /// Correct with an absolute position measurement `z` (meters).
    ///
    /// `H = [I₂ 0 0 0]`, so the innovation covariance is the position
    /// block of P plus V. The corrected error state is injected into the
    /// nominal state and then reset to exactly zero.
    pub fn update(&mut self, z: Vector2<T>) -> Result<(), EskfError> {
        let p = *self.covariance.as_matrix();
        let v = self.noise.meas_std * self.noise.meas_std;
        let mut s = p.fixed_view::<2, 2>(0, 0).into_owned();
        s[(0, 0)] += v;
        s[(1, 1)] += v;

        // Symmetric 2x2 eigenvalues for the conditioning check.
        let tr = s[(0, 0)] + s[(1, 1)];
        let diff = s[(0, 0)] - s[(1, 1)];
        let disc = (diff * diff + lit::<T>(4.0) * s[(0, 1)] * s[(0, 1)]).sqrt();
        let half: T = lit(0.5);
        let lam_max = (tr + disc) * half;
        let lam_min = (tr - disc) * half;
        if lam_min <= T::zero() || lam_max > lam_min * lit(1e12) {
            return Err(EskfError::SingularInnovation);
        }
        let s_inv = s.try_inverse().ok_or(EskfError::SingularInnovation)?;

        let ph_t = p.fixed_columns::<2>(0).into_owned();
        let gain = ph_t * s_inv;
        let innovation = z - self.nominal.position;
        let delta: SVector<T, 8> = gain * innovation;

        let hp = p.fixed_rows::<2>(0).into_owned();
        let p_new = p - gain * hp;
        self.covariance = Covariance::from_matrix(p_new);

        // Injection, then reset.
        self.error.delta = delta;
        self.nominal.position += delta.fixed_rows::<2>(0).into_owned();
        self.nominal.velocity += delta.fixed_rows::<2>(2).into_owned();
        self.nominal.accel_bias += delta.fixed_rows::<2>(4).into_owned();
        self.nominal.gravity += delta.fixed_rows::<2>(6).into_owned();
        self.error = ErrorState::zero();
        self.last_update = Some(self.last_timestamp);
        Ok(())
    }

    /// True when no visual update has landed within `window` seconds
    /// before `now`; the estimate is then running on dead reckoning.
    pub fn visual_stale(&self, now: f64, window: f64) -> bool {
        now - self.last_update.unwrap_or(self.start_time) > window
    }
}

/// Chain a converged ICP displacement onto the last accepted visual fix
/// to form the absolute position measurement for [`Filter::update`].
pub fn measurement_from_icp<T: Real>(
    prev_keyed_position: Vector2<T>,
    icp: &IcpResult<T>,
) -> Result<Vector2<T>, EskfError> {
    if !icp.converged {
        return Err(EskfError::NotConverged);
    }
    Ok(prev_keyed_position + icp.translation.as_vector())
}
