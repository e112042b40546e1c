//! Scalar abstraction shared by every algorithm in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type used for edge weights, distances and predictions.
///
/// Distances use `+inf` as the unreachable sentinel, so the scalar must be a
/// float. `f32` and `f64` are provided.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance used for inequality and equality checks on
    /// accumulated sums.
    fn rel_tol() -> Self;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every float scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn rel_tol() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn rel_tol() -> Self {
        1e-9
    }
}

fn scale<S: Scalar>(a: S, b: S) -> S {
    S::one().max(a.abs()).max(b.abs())
}

/// `a <= b` up to the scalar's relative tolerance.
pub fn le_tol<S: Scalar>(a: S, b: S) -> bool {
    if b.is_infinite() && b > S::zero() {
        return true;
    }
    a <= b + S::rel_tol() * scale(a, b)
}

/// `a == b` up to the scalar's relative tolerance.
pub fn eq_tol<S: Scalar>(a: S, b: S) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= S::rel_tol() * scale(a, b)
}

/// True when `x` is within tolerance of an integer.
pub fn is_integral<S: Scalar>(x: S) -> bool {
    x.is_finite() && eq_tol(x, x.round())
}
