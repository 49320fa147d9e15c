use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar backing all numerical kernels: f32 or f64.
pub trait Real: Float + FromPrimitive + Sum + Debug + Display + Default + 'static {
    /// Lossy conversion from an f64 constant.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Sum + Debug + Display + Default + 'static {}
