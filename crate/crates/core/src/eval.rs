//! Trajectory metrics: per-axis absolute trajectory error (ATE) and
//! cross-trial aggregation.
//!
//! Estimated and ground-truth trajectories share their origin by
//! construction, so no alignment transform is applied; the truth is
//! linearly interpolated onto the estimate's timestamps.

use crate::scalar::{lit, Real};
use thiserror::Error;

/// A timestamped planar trajectory with strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    samples: Vec<TrajectorySample<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<T> {
    pub t: f64,
    pub x: T,
    pub z: T,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("trajectory timestamps must be strictly increasing (index {0})")]
    NonMonotonic(usize),
    #[error("estimate and truth share no overlapping time range")]
    NoOverlap,
    #[error("cannot summarize an empty list of reports")]
    EmptyReportList,
}

impl<T: Real> Trajectory<T> {
    pub fn new(samples: Vec<TrajectorySample<T>>) -> Result<Self, EvalError> {
        for (i, pair) in samples.windows(2).enumerate() {
            if pair[1].t <= pair[0].t {
                return Err(EvalError::NonMonotonic(i + 1));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[TrajectorySample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn time_range(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.t, self.samples.last()?.t))
    }

    /// Linear interpolation at `t`; `None` outside the sampled range.
    fn interpolate(&self, t: f64) -> Option<(T, T)> {
        let (lo, hi) = self.time_range()?;
        if t < lo || t > hi {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.t <= t);
        if idx == 0 {
            let s = self.samples[0];
            return Some((s.x, s.z));
        }
        let a = self.samples[idx - 1];
        if idx == self.samples.len() {
            return Some((a.x, a.z));
        }
        let b = self.samples[idx];
        let w: T = lit((t - a.t) / (b.t - a.t));
        Some((a.x + (b.x - a.x) * w, a.z + (b.z - a.z) * w))
    }
}

/// Per-axis RMSE of one estimated trajectory against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AteReport<T> {
    pub rmse_x: T,
    pub rmse_z: T,
    pub n_samples: usize,
}

/// Mean ± sample standard deviation of per-trial RMSEs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AteSummary<T> {
    pub mean_x: T,
    pub std_x: T,
    pub mean_z: T,
    pub std_z: T,
    pub n_trials: usize,
}

/// Per-axis ATE of `est` against `truth`, optionally restricted to a
/// time window (e.g. the period a terrain feature is visible).
pub fn compute_ate<T: Real>(
    est: &Trajectory<T>,
    truth: &Trajectory<T>,
    window: Option<(f64, f64)>,
) -> Result<AteReport<T>, EvalError> {
    let mut sx = T::zero();
    let mut sz = T::zero();
    let mut n = 0usize;
    for s in est.samples() {
        if let Some((w0, w1)) = window {
            if s.t < w0 || s.t > w1 {
                continue;
            }
        }
        if let Some((tx, tz)) = truth.interpolate(s.t) {
            let dx = s.x - tx;
            let dz = s.z - tz;
            sx += dx * dx;
            sz += dz * dz;
            n += 1;
        }
    }
    if n == 0 {
        return Err(EvalError::NoOverlap);
    }
    let count = T::from_usize(n).unwrap();
    Ok(AteReport {
        rmse_x: (sx / count).sqrt(),
        rmse_z: (sz / count).sqrt(),
        n_samples: n,
    })
}

/// Aggregate per-trial RMSEs into mean ± sample (n−1) standard
/// deviation; a single trial reports zero spread.
pub fn summarize_trials<T: Real>(reports: &[AteReport<T>]) -> Result<AteSummary<T>, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyReportList);
    }
    let n = T::from_usize(reports.len()).unwrap();
    let mut mean_x = T::zero();
    let mut mean_z = T::zero();
    for r in reports {
        mean_x += r.rmse_x;
        mean_z += r.rmse_z;
    }
    mean_x /= n;
    mean_z /= n;
    let (std_x, std_z) = if reports.len() == 1 {
        (T::zero(), T::zero())
    } else {
        let mut vx = T::zero();
        let mut vz = T::zero();
        for r in reports {
            vx += (r.rmse_x - mean_x) * (r.rmse_x - mean_x);
            vz += (r.rmse_z - mean_z) * (r.rmse_z - mean_z);
        }
        let dof = T::from_usize(reports.len() - 1).unwrap();
        ((vx / dof).sqrt(), (vz / dof).sqrt())
    };
    Ok(AteSummary {
        mean_x,
        std_x,
        mean_z,
        std_z,
        n_trials: reports.len(),
    })
}
