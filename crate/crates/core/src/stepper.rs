//! Fully-discrete scheme: explicit Euler marching of the projected
//! nonlocal operator with strong Dirichlet boundary enforcement, plus the
//! stability and maximum-principle monitors.
//!
//! The march lives on the mapped coordinate x ∈ [−1, 1]; the physical
//! column z ∈ [0, Z] (cm, z = 0 at the top) is related by x = (Z − 2z)/Z,
//! so node 0 (x = +1) is the top boundary and node N (x = −1) the bottom.
//! Boundary values are overwritten after every step, hence tracked bitwise.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::kernel::InfluenceKernel;
use crate::operator::{NonlocalOperator, OperatorInputs};
use crate::soil::{
    clamp_water_content, hydraulic_conductivity, hydraulic_potential, matric_head,
    VanGenuchtenParams,
};
use crate::spectral::{clenshaw, project, ChebGrid, GridFunction};

/// Relative slack when deciding whether T/dt is an integral step count.
const STEP_COUNT_SLACK: f64 = 1e-6;
/// Allowed mismatch between the initial profile and the t = 0 boundary values.
const COMPATIBILITY_TOL: f64 = 1e-12;

/// Linear ramp of a boundary value over [0, T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRamp {
    pub start: f64,
    pub end: f64,
}

impl BoundaryRamp {
    /// Ramp value at time `t`; the argument is clamped to [0, T], so the
    /// endpoints are returned bitwise at u = 0 and u = 1.
    pub fn value(&self, t: f64, t_final: f64) -> f64 {
        let u = if t_final > 0.0 {
            (t / t_final).clamp(0.0, 1.0)
        } else {
            0.0
        };
        self.start * (1.0 - u) + self.end * u
    }

    fn sup(&self) -> f64 {
        self.start.max(self.end)
    }
}

/// Initial water-content profile as a function of the mapped coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Two linear branches meeting at x = 0:
    /// `bottom_value + bottom_slope·(x+1)` on [−1, 0],
    /// `top_value + top_slope·(x−1)` on [0, 1].
    PiecewiseLinear {
        bottom_value: f64,
        bottom_slope: f64,
        top_value: f64,
        top_slope: f64,
    },
    /// `amplitude·cos((x+1)π/2) + offset`.
    Cosine { amplitude: f64, offset: f64 },
    /// Chebyshev expansion coefficients.
    Chebyshev { coeffs: Vec<f64> },
    /// Raw nodal values; the length must match the scenario grid.
    Nodes { values: Vec<f64> },
}

impl InitialCondition {
    /// Evaluate at a mapped coordinate. `Nodes` data cannot be evaluated
    /// off the grid and returns None away from the endpoints.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        match self {
            Self::PiecewiseLinear {
                bottom_value,
                bottom_slope,
                top_value,
                top_slope,
            } => Some(if x < 0.0 {
                bottom_value + bottom_slope * (x + 1.0)
            } else {
                top_value + top_slope * (x - 1.0)
            }),
            Self::Cosine { amplitude, offset } => {
                Some(amplitude * ((x + 1.0) * std::f64::consts::FRAC_PI_2).cos() + offset)
            }
            Self::Chebyshev { coeffs } => Some(clenshaw(coeffs, x)),
            Self::Nodes { values } => {
                if x == 1.0 {
                    values.first().copied()
                } else if x == -1.0 {
                    values.last().copied()
                } else {
                    None
                }
            }
        }
    }

    /// Sample onto a grid.
    pub fn sample(&self, grid: &ChebGrid<f64>) -> Result<Vec<f64>> {
        if let Self::Nodes { values } = self {
            if values.len() != grid.len() {
                return Err(Error::InvalidScenario(format!(
                    "nodal initial condition has {} values, grid needs {}",
                    values.len(),
                    grid.len()
                )));
            }
            return Ok(values.clone());
        }
        Ok(grid
            .nodes()
            .iter()
            .map(|&x| self.value_at(x).expect("analytic form"))
            .collect())
    }

    fn sup_on(&self, grid: &ChebGrid<f64>) -> Result<f64> {
        Ok(self
            .sample(grid)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// A complete simulation definition.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Column length Z in cm.
    pub z_len: f64,
    /// Final time T in seconds (0 allowed: the record holds only the IC).
    pub t_final: f64,
    /// Spectral degree N.
    pub degree: usize,
    /// Time step in seconds.
    pub dt: f64,
    /// Kernel horizon δ ∈ (0, 1).
    pub delta: f64,
    /// Soil constitutive parameters. K_s = 0 is tolerated here (synthetic
    /// null-dynamics setups); the validated soil constructor still
    /// requires K_s > 0.
    pub soil: VanGenuchtenParams<f64>,
    /// Constant sink rate S in 1/s (negative for root uptake).
    pub sink: f64,
    pub ic: InitialCondition,
    /// Water content at the top boundary (z = 0, x = +1).
    pub bc_top: BoundaryRamp,
    /// Water content at the bottom boundary (z = Z, x = −1).
    pub bc_bottom: BoundaryRamp,
    /// Multiply the nonlocal term by Z/2 (off by default: the operator
    /// acts on the mapped coordinate without a Jacobian factor).
    pub jacobian_scaling: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !self.z_len.is_finite() || self.z_len <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "Z must be > 0, got {}",
                self.z_len
            )));
        }
        if !self.t_final.is_finite() || self.t_final < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "T must be >= 0, got {}",
                self.t_final
            )));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.degree < 2 {
            return Err(Error::InvalidDegree(self.degree));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(Error::InvalidHorizon(self.delta));
        }
        if !self.sink.is_finite() {
            return Err(Error::InvalidScenario("sink must be finite".into()));
        }
        let p = &self.soil;
        if !p.theta_r.is_finite()
            || !p.theta_s.is_finite()
            || p.theta_r < 0.0
            || p.theta_r >= p.theta_s
            || p.theta_s > 1.0
        {
            return Err(Error::InvalidSoil(format!(
                "need 0 <= theta_r < theta_s <= 1, got theta_r={}, theta_s={}",
                p.theta_r, p.theta_s
            )));
        }
        if !p.alpha.is_finite()
            || p.alpha <= 0.0
            || !p.n.is_finite()
            || p.n <= 1.0
            || p.m != 1.0 - 1.0 / p.n
        {
            return Err(Error::InvalidSoil(format!(
                "need alpha > 0, n > 1, m = 1 - 1/n; got alpha={}, n={}, m={}",
                p.alpha, p.n, p.m
            )));
        }
        if !p.k_s.is_finite() || p.k_s < 0.0 {
            return Err(Error::InvalidSoil(format!(
                "k_s must be >= 0, got {}",
                p.k_s
            )));
        }

        let grid = ChebGrid::new(self.degree)?;
        let samples = self.ic.sample(&grid)?;
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidScenario(
                "initial condition is not finite".into(),
            ));
        }
        let top0 = samples[0];
        let bottom0 = samples[grid.degree()];
        if (top0 - self.bc_top.start).abs() > COMPATIBILITY_TOL {
            return Err(Error::InvalidScenario(format!(
                "initial condition at x=+1 ({top0}) does not match bc_top at t=0 ({})",
                self.bc_top.start
            )));
        }
        if (bottom0 - self.bc_bottom.start).abs() > COMPATIBILITY_TOL {
            return Err(Error::InvalidScenario(format!(
                "initial condition at x=-1 ({bottom0}) does not match bc_bottom at t=0 ({})",
                self.bc_bottom.start
            )));
        }
        Ok(())
    }

    /// Number of explicit steps covering [0, T].
    pub fn num_steps(&self) -> usize {
        if self.t_final == 0.0 {
            return 0;
        }
        let ratio = self.t_final / self.dt;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= STEP_COUNT_SLACK * ratio.max(1.0) {
            (nearest as usize).max(1)
        } else {
            ratio.ceil() as usize
        }
    }

    /// Time of step `n`; the final step lands exactly on T.
    pub fn step_time(&self, n: usize) -> f64 {
        if n >= self.num_steps() {
            self.t_final
        } else {
            n as f64 * self.dt
        }
    }

    /// Step index whose time is nearest to `t` (ties to the earlier step).
    pub fn nearest_step(&self, t: f64) -> usize {
        let total = self.num_steps();
        if total == 0 {
            return 0;
        }
        let guess = (t / self.dt).floor();
        let mut best = 0usize;
        let mut best_err = f64::INFINITY;
        for cand in [guess - 1.0, guess, guess + 1.0, guess + 2.0] {
            if cand < 0.0 {
                continue;
            }
            let n = (cand as usize).min(total);
            let err = (self.step_time(n) - t).abs();
            // Strict inequality keeps the earlier step on ties.
            if err < best_err {
                best_err = err;
                best = n;
            }
        }
        best
    }
}

/// Map a physical depth z ∈ [0, Z] (cm) to the unit coordinate
/// x = (Z − 2z)/Z; the top z = 0 maps to x = +1.
pub fn coordinate_map(z_len: f64, depth: f64) -> Result<f64> {
    if !(0.0..=z_len).contains(&depth) {
        return Err(Error::InvalidScenario(format!(
            "depth {depth} outside the column [0, {z_len}]"
        )));
    }
    Ok((z_len - 2.0 * depth) / z_len)
}

/// Inverse of [`coordinate_map`]: z = Z(1 − x)/2.
pub fn physical_depth(z_len: f64, x: f64) -> f64 {
    0.5 * z_len * (1.0 - x)
}

/// State of the march.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub time: f64,
    pub step_index: usize,
    pub theta: GridFunction<f64>,
}

/// One stored profile.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub requested_time: f64,
    pub time: f64,
    pub step_index: usize,
    pub theta: Vec<f64>,
}

/// Per-step maximum-principle monitor sample.
#[derive(Debug, Clone, Copy)]
pub struct MonitorSample {
    pub max_theta: f64,
    pub bound: f64,
}

/// Result of a run: snapshots plus monitor series.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub degree: usize,
    pub z_len: f64,
    /// Physical depth (cm) of each node, ascending from 0 to Z.
    pub depths: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Running value of the stability functional after each step.
    pub stability_series: Vec<f64>,
    pub max_principle_series: Vec<MonitorSample>,
    /// Steps at which the nodal maximum exceeded the bound.
    pub violations: Vec<usize>,
    pub steps_completed: usize,
    pub total_steps: usize,
    pub wall_time: Duration,
    pub complete: bool,
}

impl RunRecord {
    /// Stability functional after step `m` (1-based); None when m = 0 or
    /// beyond the completed steps.
    pub fn stability_functional(&self, m: usize) -> Option<f64> {
        if m == 0 {
            return None;
        }
        self.stability_series.get(m - 1).copied()
    }
}

/// A failed run: setup errors carry no record, aborted marches carry the
/// partial record flagged incomplete.
#[derive(Debug)]
pub enum RunFailure {
    Setup(Error),
    Aborted {
        partial: Box<RunRecord>,
        cause: Error,
    },
}

impl RunFailure {
    pub fn cause(&self) -> &Error {
        match self {
            Self::Setup(e) => e,
            Self::Aborted { cause, .. } => cause,
        }
    }
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Setup(e) => write!(f, "{e}"),
            Self::Aborted { partial, cause } => write!(
                f,
                "{cause} (run aborted after {} of {} steps)",
                partial.steps_completed, partial.total_steps
            ),
        }
    }
}

impl std::error::Error for RunFailure {}

impl From<Error> for RunFailure {
    fn from(e: Error) -> Self {
        Self::Setup(e)
    }
}

/// Attach the offending node and step to a water-content range error.
fn at_node_and_step(e: Error, node: usize, step: usize) -> Error {
    match e {
        Error::WaterContentRange {
            value,
            lower,
            upper,
            ..
        } => Error::WaterContentRange {
            value,
            lower,
            upper,
            context: format!(" at node {node}, step {step}"),
        },
        other => other,
    }
}

/// Explicit-Euler solver bound to one scenario, with the grid, the kernel
/// transform and the node depths precomputed.
pub struct Solver {
    scenario: Scenario,
    grid: Arc<ChebGrid<f64>>,
    operator: NonlocalOperator<f64>,
    depths: Vec<f64>,
    sink: GridFunction<f64>,
    zero: GridFunction<f64>,
    num_steps: usize,
}

impl Solver {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let grid = Arc::new(ChebGrid::new(scenario.degree)?);
        let kernel = InfluenceKernel::new(scenario.delta)?;
        let operator = NonlocalOperator::new(Arc::clone(&grid), kernel);
        let depths: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| physical_depth(scenario.z_len, x))
            .collect();
        let sink = GridFunction::constant(Arc::clone(&grid), scenario.sink);
        let zero = GridFunction::constant(Arc::clone(&grid), 0.0);
        let num_steps = scenario.num_steps();
        Ok(Self {
            scenario,
            grid,
            operator,
            depths,
            sink,
            zero,
            num_steps,
        })
    }

    pub fn grid(&self) -> &Arc<ChebGrid<f64>> {
        &self.grid
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    /// Node depths in cm, ascending.
    pub fn depths(&self) -> &[f64] {
        &self.depths
    }

    /// Initial state: the sampled profile passed through the full-degree
    /// projection.
    pub fn initial_state(&self) -> Result<SolverState> {
        let samples = self.scenario.ic.sample(&self.grid)?;
        let sampled = GridFunction::new(Arc::clone(&self.grid), samples)?;
        let theta = project(&sampled, self.grid.degree())?;
        Ok(SolverState {
            time: 0.0,
            step_index: 0,
            theta,
        })
    }

    /// Nodal conductivity and potential for a water-content profile.
    fn fields(&self, theta: &GridFunction<f64>, step: usize) -> Result<OperatorInputs<f64>> {
        let n = self.grid.len();
        let mut cond = Vec::with_capacity(n);
        let mut pot = Vec::with_capacity(n);
        for (i, &th) in theta.values().iter().enumerate() {
            let head =
                matric_head(&self.scenario.soil, th).map_err(|e| at_node_and_step(e, i, step))?;
            cond.push(hydraulic_conductivity(&self.scenario.soil, head));
            pot.push(hydraulic_potential(head, self.depths[i]));
        }
        OperatorInputs::new(
            GridFunction::new(Arc::clone(&self.grid), cond)?,
            GridFunction::new(Arc::clone(&self.grid), pot)?,
        )
    }

    /// Nonlocal operator applied to a profile (no sink), with the optional
    /// Jacobian scaling.
    pub fn operator_value(
        &self,
        theta: &GridFunction<f64>,
        step: usize,
    ) -> Result<GridFunction<f64>> {
        let inputs = self.fields(theta, step)?;
        let mut out = self.operator.apply_spectral(&inputs, &self.zero)?;
        if self.scenario.jacobian_scaling {
            let scale = 0.5 * self.scenario.z_len;
            for v in out.values_mut() {
                *v *= scale;
            }
        }
        Ok(out)
    }

    /// Right-hand side L(θ) + S.
    fn rhs(&self, theta: &GridFunction<f64>, step: usize) -> Result<GridFunction<f64>> {
        if self.scenario.jacobian_scaling {
            let mut out = self.operator_value(theta, step)?;
            for (v, s) in out.values_mut().iter_mut().zip(self.sink.values()) {
                *v += s;
            }
            Ok(out)
        } else {
            let inputs = self.fields(theta, step)?;
            self.operator.apply_spectral(&inputs, &self.sink)
        }
    }

    /// Advance one step: θ ← θ + Δt·P_N[L(θ) + S], then overwrite the
    /// boundary nodes with the ramp values at the new time.
    pub fn step(&self, state: &SolverState) -> Result<SolverState> {
        let step = state.step_index + 1;
        let rhs = self.rhs(&state.theta, step)?;
        let projected = project(&rhs, self.grid.degree())?;

        let dt = self.scenario.dt;
        let mut values: Vec<f64> = state
            .theta
            .values()
            .iter()
            .zip(projected.values())
            .map(|(&th, &r)| th + dt * r)
            .collect();

        let t_new = self.scenario.step_time(step);
        let last = values.len() - 1;
        values[0] = self.scenario.bc_top.value(t_new, self.scenario.t_final);
        values[last] = self.scenario.bc_bottom.value(t_new, self.scenario.t_final);

        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Unstable {
                    step,
                    reason: format!("non-finite water content {v} at node {i}"),
                });
            }
        }
        for (i, v) in values.iter_mut().enumerate() {
            *v = clamp_water_content(&self.scenario.soil, *v)
                .map_err(|e| at_node_and_step(e, i, step))?;
        }

        Ok(SolverState {
            time: t_new,
            step_index: step,
            theta: GridFunction::new(Arc::clone(&self.grid), values)?,
        })
    }
}

/// March a scenario to T, recording snapshots at the requested times
/// (nearest step, ties to the earlier one) and filling the monitor series.
/// An empty request list defaults to the final time.
pub fn run(
    scenario: &Scenario,
    snapshot_times: &[f64],
) -> std::result::Result<RunRecord, RunFailure> {
    let start = Instant::now();
    let solver = Solver::new(scenario.clone())?;
    let grid = Arc::clone(solver.grid());
    let total_steps = solver.num_steps();

    let default_times = [scenario.t_final];
    let times: &[f64] = if snapshot_times.is_empty() {
        &default_times
    } else {
        snapshot_times
    };
    let targets: Vec<(f64, usize)> = times
        .iter()
        .map(|&t| (t, scenario.nearest_step(t)))
        .collect();

    // Ingredients of the maximum-principle bound, fixed over the run.
    let sink_norm = grid.weighted_l2_norm(solver.sink.values());
    let data_sup = {
        let ic_sup = scenario.ic.sup_on(&grid).map_err(RunFailure::Setup)?;
        ic_sup
            .max(scenario.bc_top.sup())
            .max(scenario.bc_bottom.sup())
    };
    let bound_at = |t: f64| (0.5 * t).exp() * sink_norm + data_sup;

    let mut record = RunRecord {
        degree: grid.degree(),
        z_len: scenario.z_len,
        depths: solver.depths().to_vec(),
        snapshots: Vec::new(),
        stability_series: Vec::with_capacity(total_steps),
        max_principle_series: Vec::with_capacity(total_steps),
        violations: Vec::new(),
        steps_completed: 0,
        total_steps,
        wall_time: Duration::ZERO,
        complete: false,
    };

    let mut state = match solver.initial_state() {
        Ok(s) => s,
        Err(e) => return Err(RunFailure::Setup(e)),
    };
    for &(t_req, step) in &targets {
        if step == 0 {
            record.snapshots.push(Snapshot {
                requested_time: t_req,
                time: 0.0,
                step_index: 0,
                theta: state.theta.values().to_vec(),
            });
        }
    }

    let mut increments_sq = 0.0f64;
    let mut operator_sq = 0.0f64;

    for n in 1..=total_steps {
        let next = match solver.step(&state) {
            Ok(s) => s,
            Err(cause) => {
                record.wall_time = start.elapsed();
                return Err(RunFailure::Aborted {
                    partial: Box::new(record),
                    cause,
                });
            }
        };

        // Stability functional bookkeeping.
        let diff: Vec<f64> = next
            .theta
            .values()
            .iter()
            .zip(state.theta.values())
            .map(|(a, b)| a - b)
            .collect();
        let incr = grid.weighted_l2_norm(&diff);
        increments_sq += incr * incr;
        let op_now = match solver.operator_value(&next.theta, n) {
            Ok(v) => v,
            Err(cause) => {
                record.wall_time = start.elapsed();
                return Err(RunFailure::Aborted {
                    partial: Box::new(record),
                    cause,
                });
            }
        };
        let op_norm = grid.weighted_l2_norm(op_now.values());
        operator_sq += op_norm * op_norm;
        let state_norm = grid.weighted_l2_norm(next.theta.values());
        record
            .stability_series
            .push(increments_sq + state_norm * state_norm + scenario.dt * operator_sq);

        // Maximum-principle monitor.
        let max_theta = next
            .theta
            .values()
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let bound = bound_at(next.time);
        record
            .max_principle_series
            .push(MonitorSample { max_theta, bound });
        if max_theta > bound {
            record.violations.push(n);
        }

        for &(t_req, step) in &targets {
            if step == n {
                record.snapshots.push(Snapshot {
                    requested_time: t_req,
                    time: next.time,
                    step_index: n,
                    theta: next.theta.values().to_vec(),
                });
            }
        }

        record.steps_completed = n;
        state = next;
    }

    record.complete = true;
    record.wall_time = start.elapsed();
    Ok(record)
}

/// Lean march without monitors or snapshots; returns the final profile.
/// Used by the convergence studies.
pub fn run_final(scenario: &Scenario) -> std::result::Result<GridFunction<f64>, RunFailure> {
    let solver = Solver::new(scenario.clone())?;
    let mut state = solver.initial_state().map_err(RunFailure::Setup)?;
    let total = solver.num_steps();
    for _ in 1..=total {
        state = match solver.step(&state) {
            Ok(s) => s,
            Err(cause) => {
                return Err(RunFailure::Aborted {
                    partial: Box::new(RunRecord {
                        degree: solver.grid().degree(),
                        z_len: scenario.z_len,
                        depths: solver.depths().to_vec(),
                        snapshots: Vec::new(),
                        stability_series: Vec::new(),
                        max_principle_series: Vec::new(),
                        violations: Vec::new(),
                        steps_completed: state.step_index,
                        total_steps: total,
                        wall_time: Duration::ZERO,
                        complete: false,
                    }),
                    cause,
                });
            }
        };
    }
    Ok(state.theta)
}

/// A-priori bound on the nodal maximum:
/// e^{t/2}·‖S‖ + max{sup θ⁰, sup bc_top, sup bc_bottom},
/// with the sink norm taken in the discrete weighted L².
pub fn max_principle_bound(scenario: &Scenario, t: f64) -> Result<f64> {
    scenario.validate()?;
    let grid = ChebGrid::new(scenario.degree)?;
    let sink = vec![scenario.sink; grid.len()];
    let sink_norm = grid.weighted_l2_norm(&sink);
    let sup = scenario
        .ic
        .sup_on(&grid)?
        .max(scenario.bc_top.sup())
        .max(scenario.bc_bottom.sup());
    Ok((0.5 * t).exp() * sink_norm + sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soil;
    use approx::assert_abs_diff_eq;

    /// Soil with zero conductivity: the nonlocal term vanishes identically.
    fn frozen_soil() -> VanGenuchtenParams<f64> {
        VanGenuchtenParams {
            theta_r: 0.1,
            theta_s: 0.4,
            alpha: 0.03,
            n: 1.5,
            m: 1.0 - 1.0 / 1.5,
            k_s: 0.0,
        }
    }

    fn const_scenario(theta: f64, sink: f64, soil: VanGenuchtenParams<f64>) -> Scenario {
        Scenario {
            z_len: 30.0,
            t_final: 1.2,
            degree: 12,
            dt: 0.1,
            delta: 0.15,
            soil,
            sink,
            ic: InitialCondition::Nodes {
                values: vec![theta; 13],
            },
            bc_top: BoundaryRamp {
                start: theta,
                end: theta,
            },
            bc_bottom: BoundaryRamp {
                start: theta,
                end: theta,
            },
            jacobian_scaling: false,
        }
    }

    #[test]
    fn coordinate_map_endpoints_and_midpoint() {
        assert_eq!(coordinate_map(30.0, 0.0).unwrap(), 1.0);
        assert_eq!(coordinate_map(30.0, 30.0).unwrap(), -1.0);
        assert_eq!(coordinate_map(30.0, 15.0).unwrap(), 0.0);
        assert!(coordinate_map(30.0, -1.0).is_err());
        assert!(coordinate_map(30.0, 31.0).is_err());
        assert_eq!(physical_depth(30.0, 1.0), 0.0);
        assert_eq!(physical_depth(30.0, -1.0), 30.0);
    }

    #[test]
    fn zero_conductivity_keeps_interior_frozen() {
        let scenario = const_scenario(0.25, 0.0, frozen_soil());
        let solver = Solver::new(scenario).unwrap();
        let s0 = solver.initial_state().unwrap();
        let s1 = solver.step(&s0).unwrap();
        // L = 0 and S = 0 bitwise, so the interior does not move.
        assert_eq!(&s1.theta.values()[1..12], &s0.theta.values()[1..12]);
        assert_eq!(s1.theta.values()[0], 0.25);
        assert_eq!(s1.theta.values()[12], 0.25);
    }

    #[test]
    fn constant_potential_state_is_stationary() {
        // theta chosen so that h_m(theta) + z is constant across nodes.
        let p = soil::example1_sand::<f64>();
        let z_len = 30.0;
        let grid = ChebGrid::new(16).unwrap();
        let c = -50.0;
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| soil::water_content(&p, c - physical_depth(z_len, x)))
            .collect();
        let scenario = Scenario {
            z_len,
            t_final: 1.0,
            degree: 16,
            dt: 0.5,
            delta: 0.15,
            soil: p,
            sink: 0.0,
            ic: InitialCondition::Nodes {
                values: values.clone(),
            },
            bc_top: BoundaryRamp {
                start: values[0],
                end: values[0],
            },
            bc_bottom: BoundaryRamp {
                start: values[16],
                end: values[16],
            },
            jacobian_scaling: false,
        };
        let solver = Solver::new(scenario).unwrap();
        let s0 = solver.initial_state().unwrap();
        let s1 = solver.step(&s0).unwrap();
        for (a, b) in s1.theta.values().iter().zip(s0.theta.values()) {
            assert!((a - b).abs() <= 1e-10, "moved by {}", a - b);
        }
    }

    #[test]
    fn boundary_values_track_ramps_bitwise() {
        let scenario = crate::config::presets::example1();
        let mut small = scenario.clone();
        small.degree = 24;
        small.t_final = 3.0;
        let solver = Solver::new(small.clone()).unwrap();
        let mut state = solver.initial_state().unwrap();
        for _ in 0..solver.num_steps() {
            state = solver.step(&state).unwrap();
            let expected_top = small.bc_top.value(state.time, small.t_final);
            let expected_bottom = small.bc_bottom.value(state.time, small.t_final);
            assert_eq!(state.theta.values()[0], expected_top);
            assert_eq!(state.theta.values()[24], expected_bottom);
        }
        assert_eq!(state.time, 3.0);
    }

    #[test]
    fn final_step_lands_exactly_on_t() {
        let mut scenario = crate::config::presets::example1();
        scenario.degree = 16;
        // 1000 * 0.06 does not hit 60 in floating point; step_time snaps.
        assert_eq!(scenario.num_steps(), 1000);
        assert_eq!(scenario.step_time(1000), 60.0);
        let ramp = scenario.bc_top;
        assert_eq!(ramp.value(scenario.step_time(1000), 60.0), 0.1810);
    }

    #[test]
    fn t_zero_gives_ic_only_record() {
        let mut scenario = const_scenario(0.2, 0.0, frozen_soil());
        scenario.t_final = 0.0;
        let record = run(&scenario, &[]).unwrap();
        assert_eq!(record.snapshots.len(), 1);
        assert_eq!(record.snapshots[0].step_index, 0);
        assert_eq!(record.steps_completed, 0);
        assert!(record.complete);
    }

    #[test]
    fn snapshot_ties_resolve_to_earlier_step() {
        let mut scenario = const_scenario(0.2, 0.0, frozen_soil());
        scenario.dt = 0.25;
        scenario.t_final = 1.0;
        // 0.375 is exactly halfway between steps 1 (0.25) and 2 (0.5).
        assert_eq!(scenario.nearest_step(0.375), 1);
        assert_eq!(scenario.nearest_step(0.5), 2);
        assert_eq!(scenario.nearest_step(100.0), 4);
    }

    #[test]
    fn frozen_dynamics_keep_stability_functional_at_initial_norm() {
        let scenario = const_scenario(0.25, 0.0, frozen_soil());
        let record = run(&scenario, &[]).unwrap();
        let grid = ChebGrid::new(scenario.degree).unwrap();
        let norm = grid.weighted_l2_norm(&[0.25; 13]);
        let expected = norm * norm;
        for m in 1..=record.steps_completed {
            let value = record.stability_functional(m).unwrap();
            assert_abs_diff_eq!(value, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn first_increment_matches_projected_rhs() {
        let mut scenario = crate::config::presets::example1();
        scenario.degree = 32;
        let solver = Solver::new(scenario.clone()).unwrap();
        let s0 = solver.initial_state().unwrap();
        let s1 = solver.step(&s0).unwrap();
        let rhs = solver.rhs(&s0.theta, 1).unwrap();
        let projected = project(&rhs, 32).unwrap();
        let grid = solver.grid();

        // ‖θ1 − θ0‖² decomposes into the interior Euler update plus the
        // boundary overwrite contributions.
        let diff: Vec<f64> = s1
            .theta
            .values()
            .iter()
            .zip(s0.theta.values())
            .map(|(a, b)| a - b)
            .collect();
        let actual = {
            let n = grid.weighted_l2_norm(&diff);
            n * n
        };
        let w = grid.quad_weights();
        let mut expected = 0.0;
        for (h, &r) in projected.values().iter().enumerate().take(32).skip(1) {
            let d = scenario.dt * r;
            expected += w[h] * d * d;
        }
        let d_top = s1.theta.values()[0] - s0.theta.values()[0];
        let d_bot = s1.theta.values()[32] - s0.theta.values()[32];
        expected += w[0] * d_top * d_top + w[32] * d_bot * d_bot;
        assert_abs_diff_eq!(actual, expected, epsilon = 1e-14);
    }

    #[test]
    fn one_step_halving_error_is_second_order() {
        // One dt-step versus two dt/2-steps differs at O(dt²) on smooth
        // states: halving dt shrinks the difference by about 4.
        let mut scenario = crate::config::presets::example2();
        scenario.degree = 32;
        let diff_for = |dt: f64| -> f64 {
            let mut coarse = scenario.clone();
            coarse.dt = dt;
            let solver = Solver::new(coarse).unwrap();
            let s0 = solver.initial_state().unwrap();
            let one = solver.step(&s0).unwrap();

            let mut fine = scenario.clone();
            fine.dt = 0.5 * dt;
            let solver = Solver::new(fine).unwrap();
            let two = solver.step(&solver.step(&s0).unwrap()).unwrap();

            one.theta
                .values()
                .iter()
                .zip(two.theta.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        let diffs: Vec<f64> = [0.24, 0.12, 0.06].iter().map(|&dt| diff_for(dt)).collect();
        for pair in diffs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (3.0..=5.0).contains(&ratio),
                "halving ratio {ratio} (diffs {diffs:?})"
            );
        }
    }

    #[test]
    fn jacobian_scaling_multiplies_the_nonlocal_term() {
        let p = soil::example1_sand::<f64>();
        let grid = ChebGrid::<f64>::new(16).unwrap();
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| 0.15 + 0.05 * (x + 1.0))
            .collect();
        let mut scenario = Scenario {
            z_len: 30.0,
            t_final: 1.0,
            degree: 16,
            dt: 0.1,
            delta: 0.15,
            soil: p,
            sink: 0.0,
            ic: InitialCondition::Nodes {
                values: values.clone(),
            },
            bc_top: BoundaryRamp {
                start: values[0],
                end: values[0],
            },
            bc_bottom: BoundaryRamp {
                start: values[16],
                end: values[16],
            },
            jacobian_scaling: false,
        };
        let plain = Solver::new(scenario.clone()).unwrap();
        let s0 = plain.initial_state().unwrap();
        let step_plain = plain.step(&s0).unwrap();

        scenario.jacobian_scaling = true;
        let scaled = Solver::new(scenario.clone()).unwrap();
        let step_scaled = scaled.step(&s0).unwrap();

        for h in 1..16 {
            let d_plain = step_plain.theta.values()[h] - s0.theta.values()[h];
            let d_scaled = step_scaled.theta.values()[h] - s0.theta.values()[h];
            assert_abs_diff_eq!(
                d_scaled,
                15.0 * d_plain,
                epsilon = 1e-15 + 1e-10 * d_plain.abs()
            );
        }
    }

    #[test]
    fn single_step_matches_quadrature_oracle_within_pinned_gap() {
        // One explicit step from the first preset's initial profile: the
        // interior update rate must sit within the measured
        // spectral-vs-quadrature operator discrepancy of these fields
        // (2.394e-3 at N = 100, pinned with margin).
        const PINNED_GAP: f64 = 2.7e-3;

        let scenario = crate::config::presets::example1();
        let solver = Solver::new(scenario.clone()).unwrap();
        let s0 = solver.initial_state().unwrap();
        let s1 = solver.step(&s0).unwrap();

        let inputs = solver.fields(&s0.theta, 1).unwrap();
        let op = NonlocalOperator::new(
            Arc::clone(solver.grid()),
            InfluenceKernel::new(scenario.delta).unwrap(),
        );
        let sink = GridFunction::constant(Arc::clone(solver.grid()), scenario.sink);
        let oracle = op.apply_quadrature(&inputs, &sink).unwrap();

        let n = scenario.degree;
        let mut worst = 0.0f64;
        for h in 1..n {
            let rate = (s1.theta.values()[h] - s0.theta.values()[h]) / scenario.dt;
            worst = worst.max((rate - oracle.values()[h]).abs());
        }
        assert!(worst <= PINNED_GAP, "interior rate vs oracle: {worst:.6e}");
    }

    #[test]
    fn max_principle_bound_reduces_to_data_sup_without_sink() {
        let scenario = const_scenario(0.3, 0.0, frozen_soil());
        for t in [0.0, 0.6, 1.2] {
            assert_eq!(max_principle_bound(&scenario, t).unwrap(), 0.3);
        }
    }

    #[test]
    fn unstable_run_reports_partial_record() {
        let mut scenario = const_scenario(0.25, 0.0, frozen_soil());
        // A sink strong enough to punch through the admissible range in
        // two steps.
        scenario.soil = soil::example1_sand();
        scenario.ic = InitialCondition::Nodes {
            values: vec![0.25; 13],
        };
        scenario.bc_top = BoundaryRamp {
            start: 0.25,
            end: 0.25,
        };
        scenario.bc_bottom = BoundaryRamp {
            start: 0.25,
            end: 0.25,
        };
        scenario.sink = -1.0;
        let failure = run(&scenario, &[]).unwrap_err();
        match failure {
            RunFailure::Aborted { partial, cause } => {
                assert!(!partial.complete);
                assert!(partial.steps_completed < partial.total_steps);
                match cause {
                    Error::WaterContentRange { context, .. } => {
                        assert!(context.contains("step"), "context: {context}")
                    }
                    Error::Unstable { .. } => {}
                    other => panic!("unexpected cause {other}"),
                }
            }
            RunFailure::Setup(e) => panic!("expected aborted run, got setup error {e}"),
        }
    }

    #[test]
    fn incompatible_ic_and_bc_rejected() {
        let mut scenario = const_scenario(0.25, 0.0, frozen_soil());
        scenario.bc_top = BoundaryRamp {
            start: 0.26,
            end: 0.2,
        };
        assert!(matches!(
            scenario.validate(),
            Err(Error::InvalidScenario(_))
        ));
    }

    #[test]
    fn runs_are_bit_reproducible() {
        let mut scenario = crate::config::presets::example2();
        scenario.degree = 24;
        scenario.t_final = 6.0;
        let a = run(&scenario, &[6.0]).unwrap();
        let b = run(&scenario, &[6.0]).unwrap();
        assert_eq!(a.snapshots[0].theta, b.snapshots[0].theta);
        assert_eq!(a.stability_series, b.stability_series);
    }
}
