//! Translation-only 2D ICP between consecutive feature sets.
//!
//! Rotation is handled upstream by the IMU-driven ground-frame
//! conversion, so alignment reduces to a pure translation. Each
//! iteration matches every target point to its nearest translated
//! source point and applies the closed-form least-squares increment
//! (the mean matched residual).

use crate::cloud::PointCloud2D;
use crate::geometry::Point2D;
use crate::scalar::{lit, Real};
use nalgebra::Vector2;
use thiserror::Error;

/// A frame-to-frame camera displacement in the sagittal plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement2D<T> {
    pub dx: T,
    pub dz: T,
}

impl<T: Real> Displacement2D<T> {
    /// Sanity cap on a single inter-frame displacement; leg motion at
    /// camera rate stays far below this.
    pub const MAX_MAGNITUDE: f64 = 0.5;

    pub fn new(dx: T, dz: T) -> Self {
        Self { dx, dz }
    }

    pub fn zero() -> Self {
        Self {
            dx: T::zero(),
            dz: T::zero(),
        }
    }

    pub fn as_vector(self) -> Vector2<T> {
        Vector2::new(self.dx, self.dz)
    }

    pub fn magnitude(self) -> T {
        (self.dx * self.dx + self.dz * self.dz).sqrt()
    }

    /// Finite and below the sanity cap.
    pub fn is_sane(self) -> bool {
        self.dx.is_finite()
            && self.dz.is_finite()
            && self.magnitude() < lit(Self::MAX_MAGNITUDE)
    }
}

/// Outcome of an ICP run.
#[derive(Debug, Clone, PartialEq)]
pub struct IcpResult<T> {
    pub translation: Displacement2D<T>,
    /// True when the last increment magnitude dropped to the threshold.
    pub converged: bool,
    pub iterations: usize,
    /// Root-mean-square matched residual after the final increment.
    pub final_rmse: T,
    /// RMSE after each iteration; non-increasing.
    pub rmse_history: Vec<T>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IcpError {
    #[error("both clouds must be non-empty (source: {source_len}, target: {target_len})")]
    EmptyCloud {
        source_len: usize,
        target_len: usize,
    },
}

/// Estimate the translation `t` such that `source + t ≈ target`.
///
/// `t0` seeds the search (typically the filter-predicted displacement),
/// `t_th` is the convergence threshold on the increment magnitude in
/// meters, and `max_iter` caps the iteration count.
pub fn icp_translation<T: Real>(
    source: &PointCloud2D<T>,
    target: &PointCloud2D<T>,
    t0: Displacement2D<T>,
    t_th: T,
    max_iter: usize,
) -> Result<IcpResult<T>, IcpError> {
    if source.is_empty() || target.is_empty() {
        return Err(IcpError::EmptyCloud {
            source_len: source.len(),
            target_len: target.len(),
        });
    }
    assert!(t_th > T::zero(), "t_th must be positive");
    assert!(max_iter >= 1, "max_iter must be at least 1");

    let mut t = t0.as_vector();
    let mut converged = false;
    let mut iterations = 0;
    let mut rmse = T::zero();
    let mut rmse_history = Vec::with_capacity(max_iter);
    let mut matches = vec![0usize; target.len()];

    for _ in 0..max_iter {
        iterations += 1;
        // Eq.-style correspondence: for each target point, the nearest
        // translated source point; ties break toward the lowest index.
        for (mi, tp) in matches.iter_mut().zip(&target.points) {
            let mut best = T::max_value().unwrap();
            let mut best_j = 0usize;
            for (j, sp) in source.points.iter().enumerate() {
                let dx = tp.x - (sp.x + t.x);
                let dz = tp.z - (sp.z + t.y);
                let d2 = dx * dx + dz * dz;
                if d2 < best {
                    best = d2;
                    best_j = j;
                }
            }
            *mi = best_j;
        }
        // Closed-form translation increment: mean matched residual.
        let mut delta = Vector2::zeros();
        for (tp, &j) in target.points.iter().zip(&matches) {
            let sp = source.points[j];
            delta.x += tp.x - (sp.x + t.x);
            delta.y += tp.z - (sp.z + t.y);
        }
        let n = T::from_usize(target.len()).unwrap();
        delta /= n;
        t += delta;

        let mut sq = T::zero();
        for (tp, &j) in target.points.iter().zip(&matches) {
            let sp = source.points[j];
            let dx = tp.x - (sp.x + t.x);
            let dz = tp.z - (sp.z + t.y);
            sq += dx * dx + dz * dz;
        }
        rmse = (sq / n).sqrt();
        rmse_history.push(rmse);

        if delta.norm() <= t_th {
            converged = true;
            break;
        }
    }

    Ok(IcpResult {
        translation: Displacement2D::new(t.x, t.y),
        converged,
        iterations,
        final_rmse: rmse,
        rmse_history,
    })
}
