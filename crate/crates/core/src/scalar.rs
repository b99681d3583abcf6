use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by every numeric routine in the crate.
///
/// Implemented for `f32` and `f64`. Tolerances are per-type because the
/// simplex and hull routines need them scaled to the available precision.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Pivot magnitudes below this are treated as zero by the simplex.
    fn pivot_tolerance() -> Self;
    /// Feasibility tolerance for separation and hull tests.
    fn feasibility_tolerance() -> Self;
    /// Tolerance for orthogonality and other linear-algebra residuals.
    fn residual_tolerance() -> Self;

    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn pivot_tolerance() -> Self {
        1e-11
    }
    fn feasibility_tolerance() -> Self {
        1e-7
    }
    fn residual_tolerance() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn pivot_tolerance() -> Self {
        1e-6
    }
    fn feasibility_tolerance() -> Self {
        1e-3
    }
    fn residual_tolerance() -> Self {
        1e-5
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
