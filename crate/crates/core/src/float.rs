//! Scalar abstraction: everything in this crate is generic over a real
//! floating-point type `F: Real`, with `f64` aliases exported at the crate
//! root. `f32` instantiations compile and run; the absolute tolerances baked
//! into consistency checks are calibrated for `f64` and are widened to a
//! multiple of the machine epsilon where `f32` would otherwise reject
//! perfectly healthy states.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real scalar type for grids, densities, gate phases, and metrics.
///
/// A blanket impl covers any type with the required `num-traits` bounds,
/// which in practice means `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `F`. Panics only if `F` cannot represent
/// ordinary finite values, which no floating-point `F` triggers.
#[inline]
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("finite f64 literal must convert")
}

/// Absolute tolerance for a check specified as `base` (an `f64`-calibrated
/// bound), widened so the same check remains meaningful at lower precision:
/// `max(base, 256 * epsilon)`.
#[inline]
pub fn tol<F: Real>(base: f64) -> F {
    let widened = F::epsilon() * real::<F>(256.0);
    real::<F>(base).max(widened)
}
