//! Distributed influence function of the nonlocal operator.
//!
//! The kernel weights pair interactions by separation `y`. It vanishes on
//! the dead zone |y| < 1 − δ and ramps linearly to 1 at |y| = 1, so that
//! boundary data influence the interior. The same expression extends past
//! |y| = 1 (relevant when the integration variable runs over the whole
//! interval while the evaluation point sits away from the center).

use crate::error::{Error, Result};
use crate::scalar::Float;

/// Influence kernel with horizon parameter δ ∈ (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct InfluenceKernel<T> {
    delta: T,
}

impl<T: Float> InfluenceKernel<T> {
    pub fn new(delta: T) -> Result<Self> {
        if !delta.is_finite() || delta <= T::zero() || delta >= T::one() {
            return Err(Error::InvalidHorizon(delta.as_f64()));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Influence weight: (|y| − 1 + δ)/δ for |y| ≥ 1 − δ, else 0.
    /// Evaluated as written so the value at |y| = 1 is exactly 1; roundoff
    /// at the support edge is clamped to 0.
    pub fn weight(&self, separation: T) -> T {
        let a = separation.abs();
        if a < T::one() - self.delta {
            T::zero()
        } else {
            ((a - T::one() + self.delta) / self.delta).max(T::zero())
        }
    }

    /// Influence weight divided by the separation magnitude; 0 at y = 0
    /// (the dead zone always covers the origin for δ < 1).
    pub fn normalized_weight(&self, separation: T) -> T {
        let a = separation.abs();
        if a < T::one() - self.delta {
            T::zero()
        } else {
            ((a - T::one() + self.delta) / (self.delta * a)).max(T::zero())
        }
    }

    /// Closed-form integral of the normalized weight over [−1, 1]:
    /// 2·(1 + ((1−δ)/δ)·ln(1−δ)).
    pub fn integral(&self) -> T {
        let one = T::one();
        let two = T::from_f64_lit(2.0);
        two * (one + (one - self.delta) / self.delta * (one - self.delta).ln())
    }
}
