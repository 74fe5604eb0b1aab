//! Scalar abstraction for the math core.
//!
//! All spectral, constitutive and operator routines are generic over a
//! floating-point scalar so they can run in `f32` or `f64`. The simulation
//! layer fixes [`crate::Real`] = `f64`.

use std::fmt::{Debug, Display, LowerExp};

/// Floating-point scalar: `f32` or `f64`.
pub trait Float:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossless conversion from `f64` where the target is `f64`, nearest
    /// otherwise. Used for literal constants inside generic code.
    fn from_f64_lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 literal")
    }

    /// Widening conversion for diagnostics and error messages.
    fn as_f64(self) -> f64 {
        num_traits::NumCast::from(self).unwrap_or(f64::NAN)
    }
}

impl Float for f32 {}
impl Float for f64 {}
