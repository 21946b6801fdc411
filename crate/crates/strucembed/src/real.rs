//! Scalar abstraction: every numeric kernel in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssign, NumCast};

/// Floating-point scalar usable throughout the crate (`f32`, `f64`).
pub trait Real: Float + NumAssign + NumCast + Sum + Debug + Display + Send + Sync + 'static {
    /// Lossless-enough conversion from `f64` literals and parsed input.
    fn from_f64(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 -> Real conversion")
    }

    /// Widening conversion used for reporting and file output.
    fn as_f64(self) -> f64 {
        num_traits::cast::<Self, f64>(self).expect("Real -> f64 conversion")
    }
}

impl<T> Real for T where
    T: Float + NumAssign + NumCast + Sum + Debug + Display + Send + Sync + 'static
{
}
