use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real scalar the geometry is computed in: `f32` or `f64`.
///
/// Certification on instances with many scales needs `f64`; the sums carry
/// increments whose magnitudes differ by more than `f32` precision.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts a literal. Panics only for values the type cannot hold at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `a <= b` up to a few ulps of relative rounding.
pub(crate) fn le_ulps<T: Scalar>(a: T, b: T) -> bool {
    let scale = a.abs().max(b.abs());
    a <= b + T::epsilon() * T::lit(16.0) * scale
}

pub(crate) fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

pub(crate) fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}
