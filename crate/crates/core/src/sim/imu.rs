//! Accelerometer stream synthesis: white noise plus a bias random walk
//! on top of the body-frame specific force.

use crate::eskf::{ImuSample, NoiseParams};
use crate::geometry::Rotation2D;
use nalgebra::Vector2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Assemble IMU measurements from time-aligned world accelerations and
/// orientations: `a_m = R⁻¹(a_w − g) + a_b + a_n`, with the bias walking
/// at per-step std `σ_ab · √Δt` and white noise `σ_a` per sample.
pub fn simulate_imu(
    times: &[f64],
    world_accel: &[Vector2<f64>],
    orientation: &[f64],
    noise: &NoiseParams<f64>,
    gravity: Vector2<f64>,
    seed: u64,
) -> Vec<ImuSample<f64>> {
    assert_eq!(times.len(), world_accel.len());
    assert_eq!(times.len(), orientation.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let mut bias = Vector2::zeros();
    let mut samples = Vec::with_capacity(times.len());
    let mut prev_t: Option<f64> = None;
    for ((&t, &a_w), &angle) in times.iter().zip(world_accel).zip(orientation) {
        if let Some(pt) = prev_t {
            let dt = t - pt;
            let walk = noise.sigma_ab * dt.sqrt();
            bias.x += walk * unit.sample(&mut rng);
            bias.y += walk * unit.sample(&mut rng);
        }
        prev_t = Some(t);
        let rot = Rotation2D::new(angle);
        let white = Vector2::new(
            noise.sigma_a * unit.sample(&mut rng),
            noise.sigma_a * unit.sample(&mut rng),
        );
        let accel_body = rot.inverse().apply_vector(a_w - gravity) + bias + white;
        samples.push(ImuSample {
            timestamp: t,
            accel_body,
            rot,
        });
    }
    samples
}
