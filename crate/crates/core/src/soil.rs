//! Van Genuchten–Mualem constitutive relations.
//!
//! Retention curve θ(h_m), unsaturated conductivity K(h_m), the closed-form
//! inversion h_m(θ) through the effective saturation, and the hydraulic
//! potential H = h_m + z. Matric head is non-positive in the unsaturated
//! zone; θ = θ_S maps to h_m = 0 so that K(0) = K_S.

use crate::error::{Error, Result};
use crate::scalar::Float;

/// Fraction of (θ_S − θ_r) used as the inversion floor above θ_r.
const CLAMP_FLOOR_FRACTION: f64 = 1e-9;
/// Fraction of (θ_S − θ_r) tolerated outside the physical range before an
/// overshoot is treated as an instability rather than roundoff noise.
const CLAMP_TOLERANCE_FRACTION: f64 = 1e-6;

/// Soil constitutive parameters.
///
/// `m` is derived, `m = 1 − 1/n`, and stored so the relation holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanGenuchtenParams<T> {
    /// Residual water content θ_r (dimensionless).
    pub theta_r: T,
    /// Saturated water content θ_S (dimensionless).
    pub theta_s: T,
    /// Fitting parameter α (1/cm).
    pub alpha: T,
    /// Fitting parameter n (dimensionless, > 1).
    pub n: T,
    /// Derived exponent m = 1 − 1/n.
    pub m: T,
    /// Saturated hydraulic conductivity K_S (cm/s).
    pub k_s: T,
}

impl<T: Float> VanGenuchtenParams<T> {
    /// Validated constructor; computes `m = 1 − 1/n`.
    pub fn new(theta_r: T, theta_s: T, alpha: T, n: T, k_s: T) -> Result<Self> {
        let params = Self {
            theta_r,
            theta_s,
            alpha,
            n,
            m: T::one() - T::one() / n,
            k_s,
        };
        params.validate()?;
        Ok(params)
    }

    /// Check the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let one = T::one();
        if !self.theta_r.is_finite()
            || !self.theta_s.is_finite()
            || self.theta_r < T::zero()
            || self.theta_r >= self.theta_s
            || self.theta_s > one
        {
            return Err(Error::InvalidSoil(format!(
                "need 0 <= theta_r < theta_s <= 1, got theta_r={}, theta_s={}",
                self.theta_r, self.theta_s
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= T::zero() {
            return Err(Error::InvalidSoil(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !self.n.is_finite() || self.n <= one {
            return Err(Error::InvalidSoil(format!("n must be > 1, got {}", self.n)));
        }
        if !self.k_s.is_finite() || self.k_s <= T::zero() {
            return Err(Error::InvalidSoil(format!(
                "k_s must be > 0, got {}",
                self.k_s
            )));
        }
        if self.m != one - one / self.n {
            return Err(Error::InvalidSoil(format!(
                "m must equal 1 - 1/n exactly, got m={}, n={}",
                self.m, self.n
            )));
        }
        Ok(())
    }

    /// Lower clamp bound θ_r + 1e-9·(θ_S − θ_r).
    pub fn clamp_floor(&self) -> T {
        self.theta_r + T::from_f64_lit(CLAMP_FLOOR_FRACTION) * (self.theta_s - self.theta_r)
    }

    /// Overshoot tolerance 1e-6·(θ_S − θ_r).
    pub fn clamp_tolerance(&self) -> T {
        T::from_f64_lit(CLAMP_TOLERANCE_FRACTION) * (self.theta_s - self.theta_r)
    }
}

/// Retention curve: θ(h_m) = θ_r + (θ_S − θ_r)/(1 + |α h_m|^n)^m.
pub fn water_content<T: Float>(p: &VanGenuchtenParams<T>, matric_head: T) -> T {
    let a = (p.alpha * matric_head).abs();
    p.theta_r + (p.theta_s - p.theta_r) / (T::one() + a.powf(p.n)).powf(p.m)
}

/// Mualem conductivity:
/// K(h_m) = K_S · b^{m/2} · [1 − (1 − b)^m]² with b = 1/(1 + |α h_m|^n).
pub fn hydraulic_conductivity<T: Float>(p: &VanGenuchtenParams<T>, matric_head: T) -> T {
    let a = (p.alpha * matric_head).abs();
    let b = T::one() / (T::one() + a.powf(p.n));
    let half = T::from_f64_lit(0.5);
    let bracket = T::one() - (T::one() - b).powf(p.m);
    p.k_s * b.powf(p.m * half) * bracket * bracket
}

/// Closed-form inversion of the retention curve.
///
/// Accepts θ in [clamp_floor, θ_S]; callers running a time march should
/// first pass nodal values through [`clamp_water_content`].
pub fn matric_head<T: Float>(p: &VanGenuchtenParams<T>, theta: T) -> Result<T> {
    let floor = p.clamp_floor();
    if !(theta >= floor && theta <= p.theta_s) || !theta.is_finite() {
        return Err(Error::WaterContentRange {
            value: theta.as_f64(),
            lower: floor.as_f64(),
            upper: p.theta_s.as_f64(),
            context: String::new(),
        });
    }
    let se = (theta - p.theta_r) / (p.theta_s - p.theta_r);
    if se >= T::one() {
        return Ok(T::zero());
    }
    let inner = se.powf(-T::one() / p.m) - T::one();
    Ok(-inner.powf(T::one() / p.n) / p.alpha)
}

/// Clamp a nodal water content into the invertible range.
///
/// Overshoots within the tolerance are clamped silently (forward Euler
/// noise); anything larger is reported as out of range with the offending
/// value.
pub fn clamp_water_content<T: Float>(p: &VanGenuchtenParams<T>, theta: T) -> Result<T> {
    let floor = p.clamp_floor();
    let tol = p.clamp_tolerance();
    if !theta.is_finite() || theta < floor - tol || theta > p.theta_s + tol {
        return Err(Error::WaterContentRange {
            value: theta.as_f64(),
            lower: floor.as_f64(),
            upper: p.theta_s.as_f64(),
            context: String::new(),
        });
    }
    Ok(num_traits::clamp(theta, floor, p.theta_s))
}

/// Hydraulic potential H = h_m + z (both in cm).
pub fn hydraulic_potential<T: Float>(matric_head: T, elevation: T) -> T {
    matric_head + elevation
}

/// Sand of the first bundled scenario:
/// θ_r = 0.075, θ_S = 0.287, α = 0.036, n = 1.56, K_S = 0.00094 cm/s.
pub fn example1_sand<T: Float>() -> VanGenuchtenParams<T> {
    VanGenuchtenParams::new(
        T::from_f64_lit(0.075),
        T::from_f64_lit(0.287),
        T::from_f64_lit(0.036),
        T::from_f64_lit(1.56),
        T::from_f64_lit(0.00094),
    )
    .expect("valid built-in parameters")
}

/// Berino loamy fine sand of the second bundled scenario:
/// θ_r = 0.0286, θ_S = 0.3658, α = 0.028, n = 2.2390, K_S = 0.0063 cm/s.
pub fn example2_berino<T: Float>() -> VanGenuchtenParams<T> {
    VanGenuchtenParams::new(
        T::from_f64_lit(0.0286),
        T::from_f64_lit(0.3658),
        T::from_f64_lit(0.028),
        T::from_f64_lit(2.2390),
        T::from_f64_lit(0.0063),
    )
    .expect("valid built-in parameters")
}
