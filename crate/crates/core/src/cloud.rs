//! Point-cloud types and the preprocessing chain: sagittal slab
//! extraction, rotation into the ground frame, uniform downsampling, and
//! k-nearest-neighbor smoothing.

use crate::geometry::{Point2D, Point3D, Rotation2D};
use crate::scalar::Real;
use thiserror::Error;

/// Coordinate frame a 2D cloud is currently expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Raw sagittal projection, still axis-aligned with the camera.
    Camera,
    /// Rotated into the ground frame (gravity-aligned, camera-centered).
    Ground,
}

/// A raw depth frame: ordered 3D points plus a capture timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud3D<T> {
    pub points: Vec<Point3D<T>>,
    /// Seconds; finite and non-negative.
    pub timestamp: f64,
}

impl<T: Real> PointCloud3D<T> {
    pub fn new(points: Vec<Point3D<T>>, timestamp: f64) -> Self {
        Self { points, timestamp }
    }
}

/// A sagittal-plane cloud tagged with the frame of its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud2D<T> {
    pub points: Vec<Point2D<T>>,
    pub timestamp: f64,
    pub frame: Frame,
}

impl<T: Real> PointCloud2D<T> {
    pub fn new(points: Vec<Point2D<T>>, timestamp: f64, frame: Frame) -> Self {
        Self {
            points,
            timestamp,
            frame,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean of the points; `None` when empty.
    pub fn centroid(&self) -> Option<Point2D<T>> {
        if self.points.is_empty() {
            return None;
        }
        let mut sx = T::zero();
        let mut sz = T::zero();
        for p in &self.points {
            sx += p.x;
            sz += p.z;
        }
        let n = T::from_usize(self.points.len()).unwrap();
        Some(Point2D::new(sx / n, sz / n))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CloudError {
    /// Guard against rotating a cloud that is already in the ground frame.
    #[error("cloud is already in the ground frame")]
    AlreadyGround,
}

/// Keep the `(x, z)` of points inside the sagittal slab `|y| < half_width`.
///
/// Order is preserved and the output is tagged [`Frame::Camera`]. The
/// slab bound is strict, so boundary points are dropped.
pub fn project_sagittal<T: Real>(cloud: &PointCloud3D<T>, half_width: T) -> PointCloud2D<T> {
    assert!(half_width > T::zero(), "half_width must be positive");
    let points = cloud
        .points
        .iter()
        .filter(|p| p.y.abs() < half_width)
        .map(|p| Point2D::new(p.x, p.z))
        .collect();
    PointCloud2D::new(points, cloud.timestamp, Frame::Camera)
}

/// Rotate a camera-frame cloud into the ground frame.
///
/// The rotation comes from the IMU orientation at capture time. The
/// result stays camera-centered; only the axes become gravity-aligned.
pub fn to_ground_frame<T: Real>(
    cloud: &PointCloud2D<T>,
    rot: Rotation2D<T>,
) -> Result<PointCloud2D<T>, CloudError> {
    if cloud.frame == Frame::Ground {
        return Err(CloudError::AlreadyGround);
    }
    let points = cloud.points.iter().map(|&p| rot.apply(p)).collect();
    Ok(PointCloud2D::new(points, cloud.timestamp, Frame::Ground))
}

/// Uniformly subsample a cloud down to at most `cap` points.
///
/// Selection is deterministic (evenly spaced indices) and preserves the
/// original ordering.
pub fn downsample_uniform<T: Real>(cloud: &PointCloud2D<T>, cap: usize) -> PointCloud2D<T> {
    assert!(cap > 0, "cap must be positive");
    let n = cloud.points.len();
    if n <= cap {
        return cloud.clone();
    }
    let points = (0..cap)
        .map(|i| cloud.points[i * n / cap])
        .collect();
    PointCloud2D::new(points, cloud.timestamp, cloud.frame)
}

/// Replace each point by the centroid of its `k` nearest neighbors
/// (inclusive of itself). Clouds smaller than `k` use all points.
pub fn smooth_knn<T: Real>(cloud: &PointCloud2D<T>, k: usize) -> PointCloud2D<T> {
    assert!(k >= 1, "k must be at least 1");
    let n = cloud.points.len();
    if n == 0 || k == 1 {
        return cloud.clone();
    }
    if n <= k {
        let c = cloud.centroid().unwrap();
        return PointCloud2D::new(vec![c; n], cloud.timestamp, cloud.frame);
    }
    let tree = KdTree::build(&cloud.points);
    let mut scratch = NeighborHeap::new(k);
    let points = cloud
        .points
        .iter()
        .map(|&p| {
            scratch.clear();
            tree.nearest_k(p, &mut scratch);
            let mut sx = T::zero();
            let mut sz = T::zero();
            for &idx in scratch.indices() {
                sx += cloud.points[idx].x;
                sz += cloud.points[idx].z;
            }
            let m = T::from_usize(scratch.indices().len()).unwrap();
            Point2D::new(sx / m, sz / m)
        })
        .collect();
    PointCloud2D::new(points, cloud.timestamp, cloud.frame)
}

/// Static 2D kd-tree over cloud indices.
///
/// Smoothing queries every point of a multi-thousand-point cloud each
/// frame; a brute-force scan is quadratic and blows the per-frame
/// latency budget.
struct KdTree<T> {
    nodes: Vec<KdNode<T>>,
    root: usize,
}

struct KdNode<T> {
    point: Point2D<T>,
    index: usize,
    axis: u8,
    left: usize,
    right: usize,
}

const KD_NONE: usize = usize::MAX;

impl<T: Real> KdTree<T> {
    fn build(points: &[Point2D<T>]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = Self::build_rec(points, &mut order, 0, &mut nodes);
        Self { nodes, root }
    }

    fn build_rec(
        points: &[Point2D<T>],
        order: &mut [usize],
        depth: usize,
        nodes: &mut Vec<KdNode<T>>,
    ) -> usize {
        if order.is_empty() {
            return KD_NONE;
        }
        let axis = (depth % 2) as u8;
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            let (ka, kb) = if axis == 0 {
                (points[a].x, points[b].x)
            } else {
                (points[a].z, points[b].z)
            };
            ka.partial_cmp(&kb).unwrap().then(a.cmp(&b))
        });
        let pivot = order[mid];
        let (lo, rest) = order.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = Self::build_rec(points, lo, depth + 1, nodes);
        let right = Self::build_rec(points, hi, depth + 1, nodes);
        nodes.push(KdNode {
            point: points[pivot],
            index: pivot,
            axis,
            left,
            right,
        });
        nodes.len() - 1
    }

    fn nearest_k(&self, query: Point2D<T>, heap: &mut NeighborHeap<T>) {
        if self.root != KD_NONE {
            self.search(self.root, query, heap);
        }
    }

    fn search(&self, node_id: usize, query: Point2D<T>, heap: &mut NeighborHeap<T>) {
        let node = &self.nodes[node_id];
        let dx = query.x - node.point.x;
        let dz = query.z - node.point.z;
        heap.offer(dx * dx + dz * dz, node.index);

        let diff = if node.axis == 0 { dx } else { dz };
        let (near, far) = if diff < T::zero() {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if near != KD_NONE {
            self.search(near, query, heap);
        }
        if far != KD_NONE && (!heap.full() || diff * diff < heap.worst()) {
            self.search(far, query, heap);
        }
    }
}

/// Fixed-capacity max-heap of (squared distance, index) pairs.
struct NeighborHeap<T> {
    k: usize,
    entries: Vec<(T, usize)>,
}

impl<T: Real> NeighborHeap<T> {
    fn new(k: usize) -> Self {
        Self {
            k,
            entries: Vec::with_capacity(k),
        }
    }

    fn clear(&mut self) {
        self.entries.clear();
    }

    fn full(&self) -> bool {
        self.entries.len() == self.k
    }

    fn worst(&self) -> T {
        self.entries[0].0
    }

    fn offer(&mut self, dist2: T, index: usize) {
        if self.entries.len() < self.k {
            self.entries.push((dist2, index));
            let mut i = self.entries.len() - 1;
            while i > 0 {
                let parent = (i - 1) / 2;
                if self.entries[parent].0 < self.entries[i].0 {
                    self.entries.swap(parent, i);
                    i = parent;
                } else {
                    break;
                }
            }
        } else if dist2 < self.worst() {
            self.entries[0] = (dist2, index);
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut largest = i;
                if l < self.entries.len() && self.entries[l].0 > self.entries[largest].0 {
                    largest = l;
                }
                if r < self.entries.len() && self.entries[r].0 > self.entries[largest].0 {
                    largest = r;
                }
                if largest == i {
                    break;
                }
                self.entries.swap(i, largest);
                i = largest;
            }
        }
    }

    fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|&(_, i)| i).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn cloud2(points: Vec<(f64, f64)>) -> PointCloud2D<f64> {
        PointCloud2D::new(
            points.into_iter().map(|(x, z)| Point2D::new(x, z)).collect(),
            0.0,
            Frame::Camera,
        )
    }

    #[test]
    fn projection_keeps_only_slab_points() {
        let cloud = PointCloud3D::new(
            vec![
                Point3D::new(1.2, 0.03, 0.4),
                Point3D::new(0.8, 0.20, 0.1),
            ],
            1.5,
        );
        let out = project_sagittal(&cloud, 0.05);
        assert_eq!(out.points, vec![Point2D::new(1.2, 0.4)]);
        assert_eq!(out.timestamp, 1.5);
        assert_eq!(out.frame, Frame::Camera);
    }

    #[test]
    fn projection_of_empty_cloud_is_empty() {
        let out = project_sagittal(&PointCloud3D::<f64>::new(vec![], 0.0), 0.05);
        assert!(out.is_empty());
    }

    #[test]
    fn projection_retains_slab_center_and_drops_boundary() {
        let cloud = PointCloud3D::new(
            vec![
                Point3D::new(1.0, 0.0, 2.0),
                Point3D::new(3.0, 0.0, 4.0),
                Point3D::new(5.0, 0.05, 6.0),
            ],
            0.0,
        );
        let out = project_sagittal(&cloud, 0.05);
        assert_eq!(
            out.points,
            vec![Point2D::new(1.0, 2.0), Point2D::new(3.0, 4.0)]
        );
    }

    #[test]
    fn ground_frame_transform_is_guarded_against_double_application() {
        let cloud = cloud2(vec![(1.0, 0.0)]);
        let once = to_ground_frame(&cloud, Rotation2D::new(0.1)).unwrap();
        assert_eq!(once.frame, Frame::Ground);
        assert_eq!(
            to_ground_frame(&once, Rotation2D::new(0.1)),
            Err(CloudError::AlreadyGround)
        );
    }

    #[test]
    fn identity_rotation_changes_only_the_frame_tag() {
        let cloud = cloud2(vec![(1.0, 2.0), (-0.5, 0.25)]);
        let out = to_ground_frame(&cloud, Rotation2D::identity()).unwrap();
        assert_eq!(out.points, cloud.points);
        assert_eq!(out.frame, Frame::Ground);
    }

    #[test]
    fn smoothing_with_k1_is_identity() {
        let cloud = cloud2(vec![(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(smooth_knn(&cloud, 1).points, cloud.points);
    }

    #[test]
    fn collinear_triple_maps_to_common_centroid() {
        let cloud = cloud2(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        let out = smooth_knn(&cloud, 3);
        for p in &out.points {
            assert!((p.x - 1.0).abs() < 1e-12);
            assert!(p.z.abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_uses_all_points_when_cloud_smaller_than_k() {
        let cloud = cloud2(vec![(0.0, 0.0), (2.0, 0.0)]);
        let out = smooth_knn(&cloud, 8);
        assert_eq!(out.len(), 2);
        for p in &out.points {
            assert!((p.x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_reduces_noise_on_a_line() {
        // 100 points on z = 0.3 with 5 mm Gaussian noise; smoothing with
        // k = 8 must strictly reduce the mean distance to the true line.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let noise = Normal::new(0.0, 0.005).unwrap();
        let points: Vec<Point2D<f64>> = (0..100)
            .map(|i| Point2D::new(i as f64 * 0.01, 0.3 + noise.sample(&mut rng)))
            .collect();
        let cloud = PointCloud2D::new(points, 0.0, Frame::Ground);
        let mean_dev = |c: &PointCloud2D<f64>| {
            c.points.iter().map(|p| (p.z - 0.3).abs()).sum::<f64>() / c.len() as f64
        };
        let smoothed = smooth_knn(&cloud, 8);
        assert_eq!(smoothed.len(), cloud.len());
        assert!(mean_dev(&smoothed) < mean_dev(&cloud));
    }

    #[test]
    fn kdtree_smoothing_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.random_range(10..200);
            let k = rng.random_range(2..9usize);
            let points: Vec<Point2D<f64>> = (0..n)
                .map(|_| Point2D::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let cloud = PointCloud2D::new(points.clone(), 0.0, Frame::Ground);
            let fast = smooth_knn(&cloud, k);
            // Brute-force oracle: sort all squared distances, average the
            // first k coordinates.
            for (i, p) in points.iter().enumerate() {
                let mut dists: Vec<(f64, usize)> = points
                    .iter()
                    .enumerate()
                    .map(|(j, q)| ((p.x - q.x).powi(2) + (p.z - q.z).powi(2), j))
                    .collect();
                dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let (mut sx, mut sz) = (0.0, 0.0);
                for &(_, j) in dists.iter().take(k) {
                    sx += points[j].x;
                    sz += points[j].z;
                }
                assert!((fast.points[i].x - sx / k as f64).abs() < 1e-12);
                assert!((fast.points[i].z - sz / k as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn downsample_caps_size_and_preserves_order() {
        let cloud = cloud2((0..100).map(|i| (i as f64, 0.0)).collect());
        let out = downsample_uniform(&cloud, 10);
        assert_eq!(out.len(), 10);
        let xs: Vec<f64> = out.points.iter().map(|p| p.x).collect();
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(xs, sorted);
        // No-op under the cap.
        assert_eq!(downsample_uniform(&cloud, 200).len(), 100);
    }

    proptest! {
        #[test]
        fn projection_filter_is_exact(points in proptest::collection::vec((-2.0f64..2.0, -0.2f64..0.2, -2.0f64..2.0), 0..50)) {
            let cloud = PointCloud3D::new(
                points.iter().map(|&(x, y, z)| Point3D::new(x, y, z)).collect(),
                0.0,
            );
            let out = project_sagittal(&cloud, 0.05);
            let expected: Vec<Point2D<f64>> = points
                .iter()
                .filter(|&&(_, y, _)| y.abs() < 0.05)
                .map(|&(x, _, z)| Point2D::new(x, z))
                .collect();
            prop_assert_eq!(out.points, expected);
        }

        #[test]
        fn rotation_preserves_pairwise_distances(
            raw in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..30),
            angle in -6.3f64..6.3,
        ) {
            let cloud = cloud2(raw);
            let out = to_ground_frame(&cloud, Rotation2D::new(angle)).unwrap();
            for i in 0..cloud.len() {
                for j in (i + 1)..cloud.len() {
                    let before = cloud.points[i].distance(cloud.points[j]);
                    let after = out.points[i].distance(out.points[j]);
                    prop_assert!((before - after).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn smoothing_preserves_size_and_finiteness(
            raw in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..120),
            k in 1usize..12,
        ) {
            let cloud = cloud2(raw);
            let out = smooth_knn(&cloud, k);
            prop_assert_eq!(out.len(), cloud.len());
            prop_assert!(out.points.iter().all(|p| p.is_finite()));
        }
    }
}
