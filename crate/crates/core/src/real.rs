//! Scalar abstraction: the numeric core is generic over the floating-point
//! type, with tolerances tied to the precision of the scalar.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar for all state, channel and bound computations.
///
/// Tolerances come in three tiers: `exact_tol` for plain 2x2 algebra,
/// `channel_tol` for channel/measurement completeness checks, and
/// `composed_tol` for quantities assembled from several eigensolves or an
/// optimizer.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    fn exact_tol() -> Self;
    fn channel_tol() -> Self;
    fn composed_tol() -> Self;
}

impl Real for f64 {
    fn exact_tol() -> Self {
        1e-12
    }
    fn channel_tol() -> Self {
        1e-10
    }
    fn composed_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn exact_tol() -> Self {
        1e-5
    }
    fn channel_tol() -> Self {
        1e-4
    }
    fn composed_tol() -> Self {
        1e-3
    }
}

/// Shorthand for lifting an `f64` literal into the scalar type.
#[inline]
pub fn r<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}
