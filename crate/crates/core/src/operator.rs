//! The nonlocal diffusion operator, in two discretizations.
//!
//! `apply_spectral` realizes the transform-product form: each convolution
//! against the normalized kernel becomes a coefficient-wise product of
//! discrete Chebyshev coefficient vectors followed by an inverse transform.
//! The kernel transform depends only on (N, δ) and is precomputed when the
//! operator is built, so the per-call cost is three forward and three
//! inverse transforms.
//!
//! `apply_quadrature` discretizes the integral directly: composite Simpson
//! over the support of the kernel (panels aligned to the kink points at
//! separation 1 − δ), with the conductivity and potential evaluated through
//! Chebyshev interpolation of the nodal data. It serves as the independent
//! reference for the spectral path; the two do not agree exactly — the gap
//! between them is measured and tracked by the analysis harness.
//!
//! The diagonal term of the spectral path multiplies the nodal product K·H
//! by the kernel's constant-mode coefficient (the transform of the kernel
//! against the constant function), not by the closed-form kernel integral.
//! With that choice a spatially constant potential is exactly stationary,
//! matching the defining property of the integral form.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::InfluenceKernel;
use crate::scalar::Float;
use crate::spectral::{clenshaw, forward_transform, ChebGrid, GridFunction};

/// Minimum number of Simpson panels used by the quadrature oracle,
/// expressed as a multiple of the grid degree.
const PANELS_PER_DEGREE: usize = 4;

/// Nodal fields entering the operator. All three live on one grid and the
/// product field equals conductivity·potential by construction.
#[derive(Debug, Clone)]
pub struct OperatorInputs<T> {
    conductivity: GridFunction<T>,
    potential: GridFunction<T>,
    kh_product: GridFunction<T>,
}

impl<T: Float> OperatorInputs<T> {
    /// Build from conductivity and potential; computes the nodal product.
    pub fn new(conductivity: GridFunction<T>, potential: GridFunction<T>) -> Result<Self> {
        if !conductivity.same_grid(&potential) {
            return Err(Error::GridMismatch {
                left: conductivity.grid().len(),
                right: potential.grid().len(),
            });
        }
        let product: Vec<T> = conductivity
            .values()
            .iter()
            .zip(potential.values())
            .map(|(&k, &h)| k * h)
            .collect();
        let kh_product = GridFunction::new(Arc::clone(conductivity.grid()), product)?;
        Ok(Self {
            conductivity,
            potential,
            kh_product,
        })
    }

    pub fn conductivity(&self) -> &GridFunction<T> {
        &self.conductivity
    }

    pub fn potential(&self) -> &GridFunction<T> {
        &self.potential
    }

    /// Pointwise product conductivity·potential.
    pub fn kh_product(&self) -> &GridFunction<T> {
        &self.kh_product
    }
}

/// Nonlocal operator bound to a grid and a kernel, with the kernel
/// transform precomputed.
#[derive(Debug, Clone)]
pub struct NonlocalOperator<T> {
    grid: Arc<ChebGrid<T>>,
    kernel: InfluenceKernel<T>,
    kernel_coeffs: Vec<T>,
    kernel_mean: T,
}

impl<T: Float> NonlocalOperator<T> {
    pub fn new(grid: Arc<ChebGrid<T>>, kernel: InfluenceKernel<T>) -> Self {
        let sampled = GridFunction::from_fn(Arc::clone(&grid), |y| kernel.normalized_weight(y));
        let kernel_coeffs = forward_transform(&sampled).coeffs().to_vec();
        let kernel_mean = kernel_coeffs[0];
        Self {
            grid,
            kernel,
            kernel_coeffs,
            kernel_mean,
        }
    }

    pub fn grid(&self) -> &Arc<ChebGrid<T>> {
        &self.grid
    }

    pub fn kernel(&self) -> &InfluenceKernel<T> {
        &self.kernel
    }

    /// Constant-mode coefficient of the kernel transform; the weight of the
    /// diagonal term in the spectral path.
    pub fn kernel_mean(&self) -> T {
        self.kernel_mean
    }

    fn check_grid(&self, f: &GridFunction<T>) -> Result<()> {
        if f.grid().degree() != self.grid.degree() {
            return Err(Error::GridMismatch {
                left: self.grid.len(),
                right: f.grid().len(),
            });
        }
        Ok(())
    }

    /// Transform-product form of the operator plus the sink:
    /// ½[C(φ,Λ) + K·C(φ,H)] − ½[H·C(φ,K) + mean·Λ] + S,
    /// where C(φ,g) is the inverse transform of the coefficient-wise
    /// product of the kernel transform with the transform of g.
    pub fn apply_spectral(
        &self,
        inputs: &OperatorInputs<T>,
        sink: &GridFunction<T>,
    ) -> Result<GridFunction<T>> {
        self.check_grid(inputs.conductivity())?;
        self.check_grid(sink)?;

        let conv_kh = self.convolve(inputs.kh_product());
        let conv_pot = self.convolve(inputs.potential());
        let conv_cond = self.convolve(inputs.conductivity());

        let half = T::from_f64_lit(0.5);
        let k = inputs.conductivity().values();
        let h = inputs.potential().values();
        let kh = inputs.kh_product().values();
        let s = sink.values();

        let values: Vec<T> = (0..self.grid.len())
            .map(|i| {
                half * (conv_kh[i] + k[i] * conv_pot[i])
                    - half * (h[i] * conv_cond[i] + self.kernel_mean * kh[i])
                    + s[i]
            })
            .collect();
        GridFunction::new(Arc::clone(&self.grid), values)
    }

    /// Coefficient-wise product with the kernel transform, evaluated back
    /// at the nodes.
    fn convolve(&self, g: &GridFunction<T>) -> Vec<T> {
        let mut coeffs = forward_transform(g);
        for (c, &kc) in coeffs.coeffs_mut().iter_mut().zip(&self.kernel_coeffs) {
            *c *= kc;
        }
        crate::spectral::inverse_transform(&coeffs).into_values()
    }

    /// Direct quadrature of the integral form plus the sink. At each node
    /// the integrand is supported on at most two intervals whose inner
    /// endpoints sit at the kernel kinks; each is integrated by composite
    /// Simpson with at least `4N` panels in total.
    pub fn apply_quadrature(
        &self,
        inputs: &OperatorInputs<T>,
        sink: &GridFunction<T>,
    ) -> Result<GridFunction<T>> {
        self.check_grid(inputs.conductivity())?;
        self.check_grid(sink)?;

        let cond_coeffs = forward_transform(inputs.conductivity());
        let pot_coeffs = forward_transform(inputs.potential());
        let cond_at = |x: T| clenshaw(cond_coeffs.coeffs(), x);
        let pot_at = |x: T| clenshaw(pot_coeffs.coeffs(), x);

        let n = self.grid.degree();
        let total_panels = (PANELS_PER_DEGREE * n).max(16);
        let edge = T::one() - self.kernel.delta();
        let one = T::one();
        let half = T::from_f64_lit(0.5);

        let mut values = Vec::with_capacity(n + 1);
        for (h, &z_h) in self.grid.nodes().iter().enumerate() {
            let k_here = inputs.conductivity().values()[h];
            let h_here = inputs.potential().values()[h];

            let integrand = |zp: T| {
                self.kernel.normalized_weight(zp - z_h)
                    * half
                    * (k_here + cond_at(zp))
                    * (pot_at(zp) - h_here)
            };

            // Support of the kernel within [-1, 1]: to the left of the
            // dead zone and to the right of it.
            let mut segments: [(T, T); 2] = [(T::zero(), T::zero()); 2];
            let mut n_segments = 0;
            let left_hi = (z_h - edge).min(one);
            if left_hi > -one {
                segments[n_segments] = (-one, left_hi);
                n_segments += 1;
            }
            let right_lo = (z_h + edge).max(-one);
            if right_lo < one {
                segments[n_segments] = (right_lo, one);
                n_segments += 1;
            }

            let total_len: T = segments[..n_segments]
                .iter()
                .map(|(a, b)| *b - *a)
                .fold(T::zero(), |acc, l| acc + l);
            let mut acc = T::zero();
            if total_len > T::zero() {
                for &(a, b) in &segments[..n_segments] {
                    let fraction = ((b - a) / total_len).as_f64();
                    let panels =
                        even_at_least(((total_panels as f64) * fraction).ceil() as usize, 4);
                    acc += simpson(&integrand, a, b, panels);
                }
            }
            values.push(acc + sink.values()[h]);
        }
        GridFunction::new(Arc::clone(&self.grid), values)
    }
}

fn even_at_least(n: usize, floor: usize) -> usize {
    let n = n.max(floor);
    if n.is_multiple_of(2) {
        n
    } else {
        n + 1
    }
}

/// Composite Simpson rule with an even number of subintervals.
fn simpson<T: Float>(f: &impl Fn(T) -> T, a: T, b: T, subintervals: usize) -> T {
    debug_assert!(subintervals >= 2 && subintervals.is_multiple_of(2));
    let nf = T::from_f64_lit(subintervals as f64);
    let step = (b - a) / nf;
    let mut acc = f(a) + f(b);
    let four = T::from_f64_lit(4.0);
    let two = T::from_f64_lit(2.0);
    for i in 1..subintervals {
        let x = a + step * T::from_f64_lit(i as f64);
        let w = if i % 2 == 1 { four } else { two };
        acc += w * f(x);
    }
    acc * step / T::from_f64_lit(3.0)
}
