//! Scalar abstraction: everything numeric in this crate is generic over
//! [`Float`], implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar used throughout the crate.
pub trait Float:
    num_traits::Float + num_traits::FromPrimitive + num_traits::ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` constant into `Self`.
    fn cast(x: f64) -> Self {
        num_traits::cast(x).expect("finite f64 constant must convert")
    }

    /// Shorthand for converting a count into `Self`.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count must convert")
    }
}

impl Float for f32 {}
impl Float for f64 {}
