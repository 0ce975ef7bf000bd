use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point element type of an embedding matrix.
///
/// Averaging always accumulates in `f64` and rounds once into `Self`, so the
/// trait only needs the conversions plus a bit-level view for exact
/// comparisons.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Raw IEEE-754 bits widened to 64 bits; equal bits means identical value.
    fn to_bits_u64(self) -> u64;

    /// Round an `f64` to the nearest representable `Self`.
    fn from_f64_rounded(v: f64) -> Self;

    fn widen(self) -> f64;
}

impl Scalar for f32 {
    fn to_bits_u64(self) -> u64 {
        u64::from(self.to_bits())
    }

    fn from_f64_rounded(v: f64) -> Self {
        v as f32
    }

    fn widen(self) -> f64 {
        f64::from(self)
    }
}

impl Scalar for f64 {
    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }

    fn from_f64_rounded(v: f64) -> Self {
        v
    }

    fn widen(self) -> f64 {
        self
    }
}

/// Bitwise row equality (distinguishes `0.0` from `-0.0`).
pub fn rows_bit_equal<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits_u64() == y.to_bits_u64())
}
