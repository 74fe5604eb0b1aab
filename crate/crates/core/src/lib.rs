//! Spectral solver for a nonlocal (peridynamic) formulation of Richards'
//! equation in one spatial dimension.
//!
//! The water-content equation is posed on the mapped interval [−1, 1] with
//! a finite-range integral operator in place of the diffusion term. Space
//! is discretized by Chebyshev-Gauss-Lobatto collocation with the discrete
//! Chebyshev transform pair; the kernel convolutions become coefficient
//! products in transform space. Time marching is explicit Euler with
//! strong Dirichlet boundary enforcement. Soil physics follows the Van
//! Genuchten–Mualem constitutive relations.
//!
//! Modules:
//! - [`spectral`]: CGL grids, forward/inverse transforms, projection.
//! - [`soil`]: retention curve, conductivity, closed-form inversion.
//! - [`kernel`]: the distributed influence function and its integral.
//! - [`operator`]: the nonlocal operator, spectral path and quadrature
//!   oracle.
//! - [`stepper`]: scenarios, the explicit march, stability and
//!   maximum-principle monitors.
//! - [`analysis`]: self-convergence studies and the operator gap table.
//! - [`config`], [`output`], [`cli`]: TOML scenarios, CSV/SVG/report
//!   writers, and the command-line front end.
//!
//! The math core is generic over the scalar (`f32`/`f64` via
//! [`scalar::Float`]); the simulation layer is fixed to [`Real`].

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod kernel;
pub mod operator;
pub mod output;
pub mod scalar;
pub mod soil;
pub mod spectral;
pub mod stepper;

pub use error::{Error, Result};
pub use kernel::InfluenceKernel;
pub use operator::{NonlocalOperator, OperatorInputs};
pub use soil::VanGenuchtenParams;
pub use spectral::{
    forward_transform, inverse_transform, project, ChebCoeffs, ChebGrid, GridFunction,
};
pub use stepper::{run, run_final, RunRecord, Scenario, Solver};

/// Default scalar type for simulations.
pub type Real = f64;
/// CGL grid over the default scalar.
pub type Grid = ChebGrid<Real>;
/// Nodal data over the default scalar.
pub type Field = GridFunction<Real>;
/// Coefficient data over the default scalar.
pub type Coeffs = ChebCoeffs<Real>;
/// Soil parameters over the default scalar.
pub type Soil = VanGenuchtenParams<Real>;
