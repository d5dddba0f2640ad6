//! Floating-point abstraction shared by every numeric routine in the crate.
//!
//! Models, vectors and the similarity kernels are written once against
//! [`Scalar`] and instantiated for `f32` (training and storage) or `f64`
//! (gradient checks and reference computations).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// A real scalar usable for embeddings and SGD.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn c(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("Scalar converts to f64")
    }

    /// Width of the IEEE representation in bytes.
    const WIDTH: usize;
}

impl Scalar for f32 {
    const WIDTH: usize = 4;
}

impl Scalar for f64 {
    const WIDTH: usize = 8;
}

/// Logistic function, written to stay finite for large |x|.
pub fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `ln σ(x)` without overflow or catastrophic cancellation.
pub fn log_sigmoid<T: Scalar>(x: T) -> T {
    // ln σ(x) = -softplus(-x)
    if x >= T::zero() {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sigmoid_matches_naive_in_safe_range() {
        for i in -40..=40 {
            let x = i as f64 * 0.5;
            let naive = (1.0 / (1.0 + (-x).exp())).ln();
            assert!((log_sigmoid(x) - naive).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn log_sigmoid_is_finite_at_extremes() {
        assert!(log_sigmoid(-1000.0f64).is_finite());
        assert_eq!(log_sigmoid(1000.0f64), 0.0);
        assert!(sigmoid(-1000.0f32) >= 0.0);
        assert_eq!(sigmoid(1000.0f32), 1.0);
    }

    #[test]
    fn constants_round_trip() {
        assert_eq!(f32::c(0.025), 0.025f32);
        assert_eq!(<f64 as Scalar>::WIDTH, 8);
        assert_eq!(2.5f32.as_f64(), 2.5);
    }
}
