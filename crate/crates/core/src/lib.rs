//! Sagittal-plane visual-inertial motion estimation for a knee-mounted
//! depth camera and IMU.
//!
//! The estimator fuses two sources:
//!
//! * **Visual**: depth frames are projected onto the sagittal plane,
//!   rotated into the ground frame, smoothed, reduced to corner features
//!   of stairs or obstacles ([`terrain`]), and aligned frame-to-frame with
//!   translation-only ICP ([`icp`]).
//! * **Inertial**: body-frame accelerometer samples are integrated by an
//!   error-state Kalman filter restricted to the sagittal plane
//!   ([`eskf`]), which the chained visual position measurements correct.
//!
//! Forward kinematics ([`kinematics`]) turns the estimated knee position
//! plus encoder joint angles into ankle/heel/toe trajectories, and
//! keyframed clouds accumulate into a local 2D map ([`mapper`]). The
//! [`sim`] module generates synthetic terrain, gait, depth, and IMU data
//! so the whole pipeline can be exercised and scored ([`eval`]) without
//! hardware.
//!
//! Conventions: x is forward, z is up, angles are radians
//! counter-clockwise about the lateral axis, units are meters/seconds.
//! All estimation math is generic over the scalar type via [`scalar::Real`];
//! the aliases below fix `f64`, which the pipeline and I/O layers use.

pub mod cloud;
pub mod config;
pub mod eskf;
pub mod eval;
pub mod geometry;
pub mod icp;
pub mod io;
pub mod kinematics;
pub mod mapper;
pub mod pipeline;
pub mod scalar;
pub mod sim;
pub mod terrain;

pub use scalar::Real;

/// `f64` alias for [`geometry::Point2D`].
pub type Point2D = geometry::Point2D<f64>;
/// `f64` alias for [`geometry::Point3D`].
pub type Point3D = geometry::Point3D<f64>;
/// `f64` alias for [`geometry::Rotation2D`].
pub type Rotation2D = geometry::Rotation2D<f64>;
/// `f64` alias for [`cloud::PointCloud2D`].
pub type PointCloud2D = cloud::PointCloud2D<f64>;
/// `f64` alias for [`cloud::PointCloud3D`].
pub type PointCloud3D = cloud::PointCloud3D<f64>;
/// `f64` alias for [`terrain::Line2D`].
pub type Line2D = terrain::Line2D<f64>;
/// `f64` alias for [`terrain::FeatureSet`].
pub type FeatureSet = terrain::FeatureSet<f64>;
/// `f64` alias for [`icp::Displacement2D`].
pub type Displacement2D = icp::Displacement2D<f64>;
/// `f64` alias for [`icp::IcpResult`].
pub type IcpResult = icp::IcpResult<f64>;
/// `f64` alias for [`eskf::ImuSample`].
pub type ImuSample = eskf::ImuSample<f64>;
/// `f64` alias for [`eskf::NoiseParams`].
pub type NoiseParams = eskf::NoiseParams<f64>;
/// `f64` alias for [`eskf::Filter`].
pub type Filter = eskf::Filter<f64>;
/// `f64` alias for [`kinematics::ProsthesisModel`].
pub type ProsthesisModel = kinematics::ProsthesisModel<f64>;
/// `f64` alias for [`kinematics::JointReading`].
pub type JointReading = kinematics::JointReading<f64>;
/// `f64` alias for [`kinematics::LegPose`].
pub type LegPose = kinematics::LegPose<f64>;
/// `f64` alias for [`mapper::Map2D`].
pub type Map2D = mapper::Map2D<f64>;
/// `f64` alias for [`mapper::Keyframe`].
pub type Keyframe = mapper::Keyframe<f64>;
/// `f64` alias for [`eval::Trajectory`].
pub type Trajectory = eval::Trajectory<f64>;
/// `f64` alias for [`eval::AteReport`].
pub type AteReport = eval::AteReport<f64>;
