//! RANSAC two-line fitting on sagittal clouds and corner feature
//! extraction for stairs and obstacles.
//!
//! Treads and obstacle tops appear as horizontal segments in the ground
//! frame. The two dominant segments are fitted in turn, the higher one
//! supplies the corner (step nose / near top edge), and the points in a
//! small box around that corner become the feature set aligned by ICP.

use crate::cloud::{Frame, PointCloud2D};
use crate::geometry::Point2D;
use crate::scalar::{lit, Real};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Terrain classes the corner extractor understands. The label comes
/// from dataset/config, not from this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainKind {
    Stair,
    Obstacle,
}

/// A fitted horizontal segment: constant height plus the x-extent of its
/// supporting inliers.
#[derive(Debug, Clone, PartialEq)]
pub struct Line2D<T> {
    /// Height of the line (median z of the retained inliers).
    pub z_level: T,
    pub x_min: T,
    pub x_max: T,
    /// Indices into the fitted cloud, ascending.
    pub inlier_indices: Vec<usize>,
}

/// Corner feature points extracted around a step nose or obstacle edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet<T> {
    /// Ground-frame points inside the corner box; never empty.
    pub points: PointCloud2D<T>,
    /// The line endpoint the features surround.
    pub corner: Point2D<T>,
    pub terrain: TerrainKind,
}

impl<T: Real> FeatureSet<T> {
    /// Mean of the feature points, used for frame-to-frame association.
    pub fn mean(&self) -> Point2D<T> {
        self.points.centroid().expect("feature set is non-empty")
    }
}

/// Thresholds for line fitting and feature boxing.
#[derive(Debug, Clone, Copy)]
pub struct FeatureParams<T> {
    /// Half-height of the feature box around the corner (z), meters.
    pub d: T,
    /// Half-width of the feature box around the corner (x), meters.
    pub w: T,
    /// RANSAC inlier band half-width, meters.
    pub inlier_tol: T,
    /// RANSAC trials.
    pub iterations: usize,
    /// Minimum inliers for a line to count as consensus.
    pub min_consensus: usize,
}

impl<T: Real> Default for FeatureParams<T> {
    fn default() -> Self {
        Self {
            d: lit(0.02),
            w: lit(0.05),
            inlier_tol: lit(0.01),
            iterations: 200,
            min_consensus: 10,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TerrainError {
    #[error("need at least 2 points to fit a line, got {0}")]
    TooFewPoints(usize),
    #[error("no horizontal line reached the consensus minimum")]
    NoConsensus,
    #[error("no points fell inside the corner feature box")]
    FeatureBoxEmpty,
    #[error("feature extraction requires a ground-frame cloud")]
    WrongFrame,
}

/// Fit the horizontal line with the most inliers by seeded RANSAC.
///
/// A horizontal line is fixed by a single sampled point, so each trial
/// draws one point and scores `|z_i - z| < inlier_tol` over the cloud.
/// The winning band is then trimmed to its largest x-contiguous dense
/// run (treads are segments, and stray band points far from the segment
/// would corrupt the endpoints) and `z_level` is refit to the median z
/// of the retained inliers. Identical inputs and seed give identical
/// output.
pub fn ransac_horizontal_line<T: Real>(
    cloud: &PointCloud2D<T>,
    params: &FeatureParams<T>,
    rng_seed: u64,
) -> Result<Line2D<T>, TerrainError> {
    let n = cloud.len();
    if n < 2 {
        return Err(TerrainError::TooFewPoints(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best_count = 0usize;
    let mut best_z = T::zero();
    for _ in 0..params.iterations {
        let z = cloud.points[rng.random_range(0..n)].z;
        let count = cloud
            .points
            .iter()
            .filter(|p| (p.z - z).abs() < params.inlier_tol)
            .count();
        if count > best_count {
            best_count = count;
            best_z = z;
        }
    }
    if best_count < params.min_consensus {
        return Err(TerrainError::NoConsensus);
    }
    let band: Vec<usize> = (0..n)
        .filter(|&i| (cloud.points[i].z - best_z).abs() < params.inlier_tol)
        .collect();
    let inliers = dense_segment(cloud, band, params.inlier_tol);
    if inliers.len() < params.min_consensus {
        return Err(TerrainError::NoConsensus);
    }
    let z_level = median(inliers.iter().map(|&i| cloud.points[i].z).collect());
    let mut x_min = cloud.points[inliers[0]].x;
    let mut x_max = x_min;
    for &i in &inliers {
        let x = cloud.points[i].x;
        if x < x_min {
            x_min = x;
        }
        if x > x_max {
            x_max = x;
        }
    }
    Ok(Line2D {
        z_level,
        x_min,
        x_max,
        inlier_indices: inliers,
    })
}

/// Trim a band of inliers to its largest x-contiguous dense run.
///
/// Inliers are binned along x at `2 * tol` width; bins holding fewer
/// than `max(2, 20%)` of the median occupied-bin population are treated
/// as stray, and the longest run of dense bins wins. Falls back to the
/// whole band when nothing qualifies (very sparse clouds).
fn dense_segment<T: Real>(cloud: &PointCloud2D<T>, mut band: Vec<usize>, tol: T) -> Vec<usize> {
    if band.len() < 4 {
        band.sort_unstable();
        return band;
    }
    band.sort_by(|&a, &b| {
        cloud.points[a]
            .x
            .partial_cmp(&cloud.points[b].x)
            .unwrap()
            .then(a.cmp(&b))
    });
    let bin_w = tol * lit(2.0);
    let x0 = cloud.points[band[0]].x;
    let bin_of = |i: usize| -> usize {
        let r = (cloud.points[i].x - x0) / bin_w;
        num_traits::ToPrimitive::to_usize(&r.floor()).unwrap_or(0)
    };
    let last_bin = bin_of(*band.last().unwrap());
    let mut counts = vec![0usize; last_bin + 1];
    for &i in &band {
        counts[bin_of(i)] += 1;
    }
    let mut occupied: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    occupied.sort_unstable();
    let med = occupied[occupied.len() / 2];
    let threshold = 2.max(med / 5);
    // Longest run of bins meeting the threshold.
    let mut best = (0usize, 0usize);
    let mut run_start = None;
    for (b, &c) in counts.iter().enumerate() {
        if c >= threshold {
            if run_start.is_none() {
                run_start = Some(b);
            }
            let s = run_start.unwrap();
            if b + 1 - s > best.1 - best.0 {
                best = (s, b + 1);
            }
        } else {
            run_start = None;
        }
    }
    if best.1 == best.0 {
        return band;
    }
    let mut kept: Vec<usize> = band
        .into_iter()
        .filter(|&i| {
            let b = bin_of(i);
            b >= best.0 && b < best.1
        })
        .collect();
    kept.sort_unstable();
    kept
}

fn median<T: Real>(mut values: Vec<T>) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / lit(2.0)
    }
}

/// Extract corner features from a ground-frame sagittal cloud.
///
/// Fits the dominant horizontal line, removes its inliers (plus a
/// `2 * inlier_tol` deadband around its height, so noise tails of the
/// same surface cannot masquerade as a second line), fits the second
/// line on the remainder, and takes the corner at the end of the higher
/// line nearest the lower line's span. Features are all cloud points
/// within the `d`/`w` box centered on the corner.
pub fn extract_terrain_features<T: Real>(
    cloud: &PointCloud2D<T>,
    terrain: TerrainKind,
    params: &FeatureParams<T>,
    rng_seed: u64,
) -> Result<FeatureSet<T>, TerrainError> {
    if cloud.frame != Frame::Ground {
        return Err(TerrainError::WrongFrame);
    }
    let first = ransac_horizontal_line(cloud, params, rng_seed)?;

    let deadband = params.inlier_tol * lit(2.0);
    let first_set: std::collections::HashSet<usize> =
        first.inlier_indices.iter().copied().collect();
    let mut remainder_idx = Vec::new();
    let mut remainder_pts = Vec::new();
    for (i, p) in cloud.points.iter().enumerate() {
        if !first_set.contains(&i) && (p.z - first.z_level).abs() >= deadband {
            remainder_idx.push(i);
            remainder_pts.push(*p);
        }
    }
    let remainder = PointCloud2D::new(remainder_pts, cloud.timestamp, Frame::Ground);
    let second = match ransac_horizontal_line(&remainder, params, rng_seed.wrapping_add(1)) {
        Ok(line) => line,
        // A one-line scene has no second consensus to offer.
        Err(TerrainError::TooFewPoints(_)) => return Err(TerrainError::NoConsensus),
        Err(e) => return Err(e),
    };

    let (upper, lower) = if first.z_level >= second.z_level {
        (&first, &second)
    } else {
        (&second, &first)
    };

    // Corner = the end of the upper line closest in x to the lower
    // line's span; ties resolve toward the camera (smaller x).
    let dist_to_span = |x: T| -> T {
        if x < lower.x_min {
            lower.x_min - x
        } else if x > lower.x_max {
            x - lower.x_max
        } else {
            T::zero()
        }
    };
    let corner_x = if dist_to_span(upper.x_min) <= dist_to_span(upper.x_max) {
        upper.x_min
    } else {
        upper.x_max
    };
    let corner = Point2D::new(corner_x, upper.z_level);

    let features: Vec<Point2D<T>> = cloud
        .points
        .iter()
        .filter(|p| (p.x - corner.x).abs() <= params.w && (p.z - corner.z).abs() <= params.d)
        .copied()
        .collect();
    if features.is_empty() {
        return Err(TerrainError::FeatureBoxEmpty);
    }
    Ok(FeatureSet {
        points: PointCloud2D::new(features, cloud.timestamp, Frame::Ground),
        corner,
        terrain,
    })
}

/// True when two feature sets look like the same physical corner: the
/// Euclidean difference of their mean coordinates is strictly below the
/// gate.
pub fn associate_features<T: Real>(
    prev: &FeatureSet<T>,
    curr: &FeatureSet<T>,
    gate: T,
) -> bool {
    prev.mean().distance(curr.mean()) < gate
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn ground(points: Vec<(f64, f64)>) -> PointCloud2D<f64> {
        PointCloud2D::new(
            points.into_iter().map(|(x, z)| Point2D::new(x, z)).collect(),
            0.0,
            Frame::Ground,
        )
    }

    /// Noiseless two-step stair profile: treads at z = 0 and z = riser,
    /// riser face in between, ~2 mm spacing.
    fn two_step_cloud(riser: f64, tread: f64) -> PointCloud2D<f64> {
        let mut pts = Vec::new();
        let spacing = 0.002;
        let mut x = 0.0;
        while x <= tread {
            pts.push((x, 0.0));
            x += spacing;
        }
        let mut z = spacing;
        while z < riser {
            pts.push((tread, z));
            z += spacing;
        }
        let mut x = tread;
        while x <= 2.0 * tread {
            pts.push((x, riser));
            x += spacing;
        }
        ground(pts)
    }

    #[test]
    fn exact_line_is_recovered_with_all_inliers() {
        let pts: Vec<(f64, f64)> = (0..50).map(|i| (i as f64 * 0.28 / 49.0, 0.147)).collect();
        let line =
            ransac_horizontal_line(&ground(pts), &FeatureParams::default(), 1).unwrap();
        assert!((line.z_level - 0.147).abs() < 1e-12);
        assert_eq!(line.inlier_indices.len(), 50);
    }

    #[test]
    fn single_point_is_too_few() {
        let err =
            ransac_horizontal_line(&ground(vec![(0.0, 0.0)]), &FeatureParams::default(), 1)
                .unwrap_err();
        assert_eq!(err, TerrainError::TooFewPoints(1));
    }

    #[test]
    fn ransac_is_deterministic_for_a_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|_| (rng.random_range(0.0..1.0), rng.random_range(-0.02..0.02)))
            .collect();
        let cloud = ground(pts);
        let a = ransac_horizontal_line(&cloud, &FeatureParams::default(), 99).unwrap();
        let b = ransac_horizontal_line(&cloud, &FeatureParams::default(), 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn contaminated_line_is_recovered_in_enough_seeds() {
        // 60% inliers on z = 0.10 plus 40% uniform outliers. The
        // brute-force oracle tries every point's z as the line height.
        let params = FeatureParams::default();
        let mut hits = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let noise = Normal::new(0.0, 0.003).unwrap();
            let mut pts = Vec::new();
            for i in 0..120 {
                pts.push((i as f64 * 0.005, 0.10 + noise.sample(&mut rng)));
            }
            for _ in 0..80 {
                pts.push((
                    rng.random_range(0.0..0.6),
                    rng.random_range(-0.3..0.5),
                ));
            }
            let cloud = ground(pts);
            let line = ransac_horizontal_line(&cloud, &params, seed).unwrap();

            let brute_best = cloud
                .points
                .iter()
                .map(|p| {
                    cloud
                        .points
                        .iter()
                        .filter(|q| (q.z - p.z).abs() < params.inlier_tol)
                        .count()
                })
                .max()
                .unwrap();
            assert!(line.inlier_indices.len() >= brute_best * 4 / 5);
            if (line.z_level - 0.10).abs() < params.inlier_tol {
                hits += 1;
            }
        }
        assert!(hits >= 95, "line recovered in only {hits}/100 seeds");
    }

    #[test]
    fn two_step_profile_yields_the_step_nose() {
        let cloud = two_step_cloud(0.147, 0.28);
        let fs = extract_terrain_features(
            &cloud,
            TerrainKind::Stair,
            &FeatureParams::default(),
            5,
        )
        .unwrap();
        assert!((fs.corner.x - 0.28).abs() < 0.01, "corner x = {}", fs.corner.x);
        assert!((fs.corner.z - 0.147).abs() < 0.01, "corner z = {}", fs.corner.z);
    }

    #[test]
    fn first_and_second_line_inliers_are_disjoint() {
        let cloud = two_step_cloud(0.147, 0.28);
        let params = FeatureParams::default();
        let first = ransac_horizontal_line(&cloud, &params, 5).unwrap();
        let first_set: std::collections::HashSet<usize> =
            first.inlier_indices.iter().copied().collect();
        let rest: Vec<(f64, f64)> = cloud
            .points
            .iter()
            .enumerate()
            .filter(|(i, p)| !first_set.contains(i) && (p.z - first.z_level).abs() >= 0.02)
            .map(|(_, p)| (p.x, p.z))
            .collect();
        let second = ransac_horizontal_line(&ground(rest), &params, 6).unwrap();
        assert!((first.z_level - second.z_level).abs() > 0.1);
    }

    #[test]
    fn flat_scene_has_no_second_consensus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.004).unwrap();
        let pts: Vec<(f64, f64)> = (0..400)
            .map(|i| (i as f64 * 0.002, noise.sample(&mut rng)))
            .collect();
        let err = extract_terrain_features(
            &ground(pts),
            TerrainKind::Stair,
            &FeatureParams::default(),
            7,
        )
        .unwrap_err();
        assert_eq!(err, TerrainError::NoConsensus);
    }

    #[test]
    fn obstacle_profile_yields_the_near_top_edge() {
        // Ground on both sides of a 0.14 x 0.13 obstacle starting at x = 0.28.
        let mut pts = Vec::new();
        let spacing = 0.002;
        let mut x: f64 = -0.2;
        while x <= 0.28 {
            pts.push((x, 0.0));
            x += spacing;
        }
        let mut z = spacing;
        while z < 0.14 {
            pts.push((0.28, z));
            z += spacing;
        }
        let mut x = 0.28;
        while x <= 0.41 {
            pts.push((x, 0.14));
            x += spacing;
        }
        let mut x = 0.45;
        while x <= 0.7 {
            pts.push((x, 0.0));
            x += spacing;
        }
        let fs = extract_terrain_features(
            &ground(pts),
            TerrainKind::Obstacle,
            &FeatureParams::default(),
            2,
        )
        .unwrap();
        assert!((fs.corner.x - 0.28).abs() < 0.01, "corner x = {}", fs.corner.x);
        assert!((fs.corner.z - 0.14).abs() < 0.01, "corner z = {}", fs.corner.z);
    }

    #[test]
    fn feature_points_satisfy_the_box_constraint() {
        let cloud = two_step_cloud(0.147, 0.28);
        let params = FeatureParams::default();
        let fs =
            extract_terrain_features(&cloud, TerrainKind::Stair, &params, 5).unwrap();
        assert!(!fs.points.is_empty());
        for p in &fs.points.points {
            assert!((p.x - fs.corner.x).abs() <= params.w);
            assert!((p.z - fs.corner.z).abs() <= params.d);
        }
    }

    #[test]
    fn tiny_box_yields_feature_box_empty() {
        // Noisy stair: with a vanishing box height no point matches the
        // refit median height exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Normal::new(0.0, 0.004).unwrap();
        let mut pts = Vec::new();
        for i in 0..150 {
            pts.push((i as f64 * 0.002, noise.sample(&mut rng)));
        }
        for i in 0..150 {
            pts.push((0.3 + i as f64 * 0.002, 0.147 + noise.sample(&mut rng)));
        }
        let params = FeatureParams {
            d: 1e-12,
            ..FeatureParams::default()
        };
        let err = extract_terrain_features(&ground(pts), TerrainKind::Stair, &params, 3)
            .unwrap_err();
        assert_eq!(err, TerrainError::FeatureBoxEmpty);
    }

    #[test]
    fn extraction_requires_ground_frame() {
        let mut cloud = two_step_cloud(0.147, 0.28);
        cloud.frame = Frame::Camera;
        let err = extract_terrain_features(
            &cloud,
            TerrainKind::Stair,
            &FeatureParams::default(),
            1,
        )
        .unwrap_err();
        assert_eq!(err, TerrainError::WrongFrame);
    }

    fn feature_set_at(points: Vec<(f64, f64)>) -> FeatureSet<f64> {
        FeatureSet {
            points: ground(points),
            corner: Point2D::new(0.0, 0.0),
            terrain: TerrainKind::Stair,
        }
    }

    #[test]
    fn identical_sets_always_associate() {
        let a = feature_set_at(vec![(0.1, 0.2), (0.3, 0.1)]);
        assert!(associate_features(&a, &a.clone(), 1e-9));
    }

    #[test]
    fn distant_sets_do_not_associate() {
        let a = feature_set_at(vec![(0.0, 0.0)]);
        let b = feature_set_at(vec![(0.30, 0.0)]);
        assert!(!associate_features(&a, &b, 0.10));
    }

    #[test]
    fn association_is_strict_at_the_gate() {
        let a = feature_set_at(vec![(0.0, 0.0)]);
        let b = feature_set_at(vec![(0.10, 0.0)]);
        assert!(!associate_features(&a, &b, 0.10));
    }
}
