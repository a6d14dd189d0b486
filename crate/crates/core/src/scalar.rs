//! Scalar abstraction shared by the exact-arithmetic layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used by functions, measures, bases and norms: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold at all (NaN-free input).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar literal out of range")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `2^{-n}`, flushing to zero once the exponent leaves the representable range.
    fn pow2_neg(n: usize) -> Self {
        let e = -(n.min(i32::MAX as usize) as i32);
        Self::lit(2.0).powi(e)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Error-free transformation `a + b = s + err`.
pub(crate) fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_error_free() {
        let (s, e) = two_sum(0.5f64, 2f64.powi(-70));
        assert_eq!(s, 0.5);
        assert_eq!(e, 2f64.powi(-70));
        let (s, e) = two_sum(1.0f32, 1e-3f32);
        assert_eq!((s as f64 - 1.0) + e as f64, (1e-3f32) as f64);
    }

    #[test]
    fn pow2_neg_flushes() {
        assert_eq!(f64::pow2_neg(3), 0.125);
        assert_eq!(f64::pow2_neg(5000), 0.0);
        assert_eq!(f32::pow2_neg(200), 0.0);
    }
}
