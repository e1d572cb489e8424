//! Piecewise-axis-aligned terrain profiles in the sagittal plane.

use super::SimError;
use crate::geometry::Point2D;
use serde::{Deserialize, Serialize};

/// Flat run-in before the terrain feature and run-out after it, meters.
const APPROACH: f64 = 1.0;
const RUNOUT: f64 = 1.0;
/// Forward position of the first riser / obstacle near edge.
pub const FEATURE_ONSET: f64 = 0.28;
/// Extent of the flat profile.
const FLAT_SPAN: (f64, f64) = (-1.0, 4.0);

/// Terrain families with the dimensions that define them, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerrainSpec {
    Flat,
    Stairs {
        riser: f64,
        tread: f64,
        n_steps: usize,
    },
    Obstacle {
        height: f64,
        width: f64,
    },
}

impl TerrainSpec {
    /// Stair dimensions used throughout the experiments.
    pub fn default_stairs() -> Self {
        TerrainSpec::Stairs {
            riser: 0.147,
            tread: 0.28,
            n_steps: 5,
        }
    }

    /// Obstacle dimensions used throughout the experiments.
    pub fn default_obstacle() -> Self {
        TerrainSpec::Obstacle {
            height: 0.14,
            width: 0.13,
        }
    }
}

/// A terrain profile as an ordered list of axis-aligned segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Terrain {
    pub spec: TerrainSpec,
    segments: Vec<(Point2D<f64>, Point2D<f64>)>,
}

/// Build the polyline for a terrain spec. Treads are horizontal, risers
/// vertical; stairs climb in +x starting at [`FEATURE_ONSET`].
pub fn gen_terrain(spec: &TerrainSpec) -> Result<Terrain, SimError> {
    let mut vertices: Vec<Point2D<f64>> = Vec::new();
    match *spec {
        TerrainSpec::Flat => {
            vertices.push(Point2D::new(FLAT_SPAN.0, 0.0));
            vertices.push(Point2D::new(FLAT_SPAN.1, 0.0));
        }
        TerrainSpec::Stairs { riser, tread, n_steps } => {
            if riser <= 0.0 || tread <= 0.0 || n_steps == 0 {
                return Err(SimError::InvalidTerrain(format!(
                    "stairs riser={riser} tread={tread} n_steps={n_steps}"
                )));
            }
            vertices.push(Point2D::new(-APPROACH, 0.0));
            // Tread level k spans [k*tread, (k+1)*tread] at z = k*riser.
            for k in 0..n_steps {
                let z = k as f64 * riser;
                vertices.push(Point2D::new((k + 1) as f64 * tread, z));
                if k + 1 < n_steps {
                    vertices.push(Point2D::new((k + 1) as f64 * tread, (k + 1) as f64 * riser));
                }
            }
            let top = Point2D::new(
                n_steps as f64 * tread + RUNOUT,
                (n_steps - 1) as f64 * riser,
            );
            vertices.push(top);
        }
        TerrainSpec::Obstacle { height, width } => {
            if height <= 0.0 || width <= 0.0 {
                return Err(SimError::InvalidTerrain(format!(
                    "obstacle height={height} width={width}"
                )));
            }
            vertices.push(Point2D::new(-APPROACH, 0.0));
            vertices.push(Point2D::new(FEATURE_ONSET, 0.0));
            vertices.push(Point2D::new(FEATURE_ONSET, height));
            vertices.push(Point2D::new(FEATURE_ONSET + width, height));
            vertices.push(Point2D::new(FEATURE_ONSET + width, 0.0));
            vertices.push(Point2D::new(FEATURE_ONSET + width + RUNOUT, 0.0));
        }
    }
    let segments = vertices.windows(2).map(|w| (w[0], w[1])).collect();
    Ok(Terrain {
        spec: *spec,
        segments,
    })
}

impl Terrain {
    pub fn segments(&self) -> &[(Point2D<f64>, Point2D<f64>)] {
        &self.segments
    }

    pub fn vertices(&self) -> Vec<Point2D<f64>> {
        let mut v: Vec<Point2D<f64>> = self.segments.iter().map(|s| s.0).collect();
        if let Some(last) = self.segments.last() {
            v.push(last.1);
        }
        v
    }

    /// Ground height below `x` (highest walkable surface at that x).
    pub fn support_height(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .filter(|(a, b)| a.z == b.z && x >= a.x.min(b.x) && x <= a.x.max(b.x))
            .map(|(a, _)| a.z)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }

    /// Convex corners a swinging foot must clear (step noses, obstacle
    /// top edges).
    pub fn noses(&self) -> Vec<Point2D<f64>> {
        match self.spec {
            TerrainSpec::Flat => Vec::new(),
            TerrainSpec::Stairs { riser, tread, n_steps } => (1..n_steps)
                .map(|k| Point2D::new(k as f64 * tread, k as f64 * riser))
                .collect(),
            TerrainSpec::Obstacle { height, width } => vec![
                Point2D::new(FEATURE_ONSET, height),
                Point2D::new(FEATURE_ONSET + width, height),
            ],
        }
    }

    /// Range along a ray from `origin` in unit direction `dir` to the
    /// nearest terrain hit, if any.
    pub fn raycast(&self, origin: Point2D<f64>, dir: (f64, f64)) -> Option<f64> {
        let mut best: Option<f64> = None;
        for &(a, b) in &self.segments {
            // origin + t*dir = a + s*(b - a), t >= 0, s in [0, 1]
            let ex = b.x - a.x;
            let ez = b.z - a.z;
            let det = dir.0 * (-ez) - dir.1 * (-ex);
            if det.abs() < 1e-12 {
                continue;
            }
            let rx = a.x - origin.x;
            let rz = a.z - origin.z;
            let t = (rx * (-ez) - rz * (-ex)) / det;
            let s = (dir.0 * rz - dir.1 * rx) / det;
            if t > 1e-9 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                best = Some(best.map_or(t, |cur: f64| cur.min(t)));
            }
        }
        best
    }

    /// Distance from a point to the terrain polyline.
    pub fn distance_to(&self, p: Point2D<f64>) -> f64 {
        self.segments
            .iter()
            .map(|&(a, b)| {
                let ex = b.x - a.x;
                let ez = b.z - a.z;
                let len2 = ex * ex + ez * ez;
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((p.x - a.x) * ex + (p.z - a.z) * ez) / len2).clamp(0.0, 1.0)
                };
                let cx = a.x + t * ex;
                let cz = a.z + t * ez;
                ((p.x - cx).powi(2) + (p.z - cz).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }
}
