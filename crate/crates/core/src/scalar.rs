//! Scalar abstraction for the estimation core.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the estimation core is generic over (`f32` or `f64`).
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Lift an `f64` constant into the generic scalar.
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("finite literal")
}
