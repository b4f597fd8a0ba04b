//! Direct numerical integration of the coupled radial equation
//! `−ψ″ + V ψ = k² ψ`, used to check closed-form Jost matrices independently.
//!
//! Jost solutions are seeded with their free asymptotic form at `r_max` and propagated
//! inward with the classical fourth-order Runge–Kutta scheme at fixed step. Inward
//! propagation is stable for closed channels: the unwanted exponential decays in that
//! direction. Every result is recomputed at half the step to estimate its error.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::channels::ChannelMomenta;
use crate::error::{Error, Result};
use crate::jost::JostMatrix;
use crate::susy::SolutionSample;

type CMatrix = DMatrix<Complex64>;

/// Smallest radius reached by inward integration before extrapolating to the origin.
pub const DEFAULT_R_MIN: f64 = 1e-6;

/// Uniform radial grid `r_min, r_min + h, …, r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    step: f64,
    steps: usize,
}

impl RadialGrid {
    /// The step is adjusted to the nearest value that divides `r_max − r_min` exactly.
    pub fn new(r_min: f64, r_max: f64, step: f64) -> Result<Self> {
        if !(r_min > 0.0) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need 0 < r_min < r_max, got r_min = {r_min}, r_max = {r_max}"
            )));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
        }
        let span = r_max - r_min;
        let steps = (span / step).round().max(1.0) as usize;
        Ok(Self {
            r_min,
            r_max,
            step: span / steps as f64,
            steps,
        })
    }

    pub fn with_default_origin(r_max: f64, step: f64) -> Result<Self> {
        Self::new(DEFAULT_R_MIN, r_max, step)
    }

    /// Checks that the potential has died out at `r_max`.
    pub fn validated_for<P>(self, potential: P) -> Result<Self>
    where
        P: Fn(f64) -> DMatrix<f64>,
    {
        let tail = potential(self.r_max).iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if tail >= 1e-14 {
            return Err(Error::InvalidArgument(format!(
                "potential is still {tail:e} at r_max = {}",
                self.r_max
            )));
        }
        Ok(self)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn halved(&self) -> Self {
        Self {
            step: 0.5 * self.step,
            steps: 2 * self.steps,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Largest accepted step-halving discrepancy.
    pub tolerance: f64,
    /// Entries beyond this modulus abort the integration.
    pub overflow: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            overflow: 1e300,
        }
    }
}

/// Solution matrix and derivative at one radius, with a step-halving error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult {
    pub value: CMatrix,
    pub derivative: CMatrix,
    pub at: f64,
    pub estimated_error: f64,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct State {
    value: CMatrix,
    derivative: CMatrix,
}

/// `(V(r) − k²)` as a complex matrix.
fn coupling<P>(potential: &P, k2: &[Complex64], r: f64) -> CMatrix
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let v = potential(r);
    let mut m = v.map(|x| Complex64::new(x, 0.0));
    for (i, e) in k2.iter().enumerate() {
        m[(i, i)] -= e;
    }
    m
}

/// Fixed-step RK4 from `from` to `to` (either direction) in `steps` steps.
fn propagate<P>(
    potential: &P,
    k2: &[Complex64],
    mut state: State,
    from: f64,
    to: f64,
    steps: usize,
    overflow: f64,
) -> Result<State>
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let h = (to - from) / steps as f64;
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut w_next = coupling(potential, k2, from);
    for n in 0..steps {
        let r = from + n as f64 * h;
        let w0 = w_next;
        let wm = coupling(potential, k2, r + 0.5 * h);
        let r1 = if n + 1 == steps { to } else { r + h };
        w_next = coupling(potential, k2, r1);

        let k1v = &state.derivative;
        let k1d = &w0 * &state.value;
        let y2 = &state.value + k1v * half;
        let d2 = &state.derivative + &k1d * half;
        let k2d = &wm * &y2;
        let y3 = &state.value + &d2 * half;
        let d3 = &state.derivative + &k2d * half;
        let k3d = &wm * &y3;
        let y4 = &state.value + &d3 * full;
        let d4 = &state.derivative + &k3d * full;
        let k4d = &w_next * &y4;

        let value = &state.value + (k1v + &d2 * two + &d3 * two + &d4) * sixth;
        let derivative = &state.derivative + (k1d + k2d * two + k3d * two + k4d) * sixth;
        state = State { value, derivative };

        let big = state
            .value
            .iter()
            .chain(state.derivative.iter())
            .any(|z| !(z.norm() <= overflow));
        if big {
            return Err(Error::Overflow { r: r1 });
        }
    }
    Ok(state)
}

fn squared_momenta(momenta: &ChannelMomenta) -> Vec<Complex64> {
    momenta.k().iter().map(|k| k * k).collect()
}

/// Relative step used to estimate the local decay rate of the potential tail.
const TAIL_PROBE: f64 = 0.05;

/// Jost solution at large `r`: `diag(e^{ik r})` plus the first-order response of the
/// other channels to the coupling tail.
///
/// Without that response the closed-channel components of an open column start at zero
/// instead of at `O(V_ij)`. The discrepancy excites the solution that grows inward like
/// `e^{|k_i| r}`, and a coupling that decays more slowly than `e^{−|k_i| r}` is then never
/// negligible, whatever `r_max`. For a locally exponential tail `V_ij ≈ c e^{−μr}`, the
/// driven equation `−g″ − k_i² g = −V_ij e^{ik_j r}` has the particular solution
/// `g = V_ij e^{ik_j r} / (λ² + k_i²)` with `λ = ik_j − μ`, and `g′ = λ g`.
fn asymptotic_seed<P>(potential: &P, momenta: &ChannelMomenta, r: f64) -> State
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let n = momenta.len();
    let i = Complex64::i();
    let k = momenta.k();
    let mut value = CMatrix::zeros(n, n);
    let mut derivative = CMatrix::zeros(n, n);
    for (j, kj) in k.iter().enumerate() {
        let e = (i * kj * r).exp();
        value[(j, j)] = e;
        derivative[(j, j)] = i * kj * e;
    }
    if n == 1 {
        return State { value, derivative };
    }
    let h = TAIL_PROBE * r;
    let (outer, inner) = (potential(r), potential(r - h));
    for row in 0..n {
        for col in 0..n {
            let (v, w) = (outer[(row, col)], inner[(row, col)]);
            // only same-sign, decaying tails have a well-defined local rate
            if row == col || v == 0.0 || !(v / w > 0.0 && v.abs() < w.abs()) {
                continue;
            }
            let mu = (w / v).ln() / h;
            let lambda = i * k[col] - mu;
            let denominator = lambda * lambda + k[row] * k[row];
            if denominator.norm() < 1e-8 {
                continue;
            }
            let g = v * value[(col, col)] / denominator;
            value[(row, col)] = g;
            derivative[(row, col)] = lambda * g;
        }
    }
    State { value, derivative }
}

/// Jost solution at the origin: inward propagation to `r_min`, then linear
/// extrapolation through the samples at `r_min` and `2 r_min`.
fn jost_at_origin<P>(potential: &P, momenta: &ChannelMomenta, grid: &RadialGrid, cfg: &OracleConfig) -> Result<State>
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let k2 = squared_momenta(momenta);
    let seed = asymptotic_seed(potential, momenta, grid.r_max);
    let at_min = propagate(potential, &k2, seed, grid.r_max, grid.r_min, grid.steps, cfg.overflow)?;
    let at_twice = propagate(potential, &k2, at_min.clone(), grid.r_min, 2.0 * grid.r_min, 1, cfg.overflow)?;
    Ok(State {
        value: &at_min.value * Complex64::new(2.0, 0.0) - at_twice.value,
        derivative: &at_min.derivative * Complex64::new(2.0, 0.0) - at_twice.derivative,
    })
}

fn max_difference(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Jost solution `f(k, 0)`, `f′(k, 0)` with a step-halving error estimate. The result is
/// the one at the nominal step.
pub fn jost_solution_at_origin<P>(
    potential: P,
    momenta: &ChannelMomenta,
    grid: &RadialGrid,
    cfg: &OracleConfig,
) -> Result<IntegrationResult>
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let coarse = jost_at_origin(&potential, momenta, grid, cfg)?;
    let fine = jost_at_origin(&potential, momenta, &grid.halved(), cfg)?;
    let estimated_error = max_difference(&coarse.value, &fine.value);
    Ok(IntegrationResult {
        value: coarse.value,
        derivative: coarse.derivative,
        at: 0.0,
        estimated_error,
        reliable: estimated_error <= cfg.tolerance,
    })
}

/// Jost matrix `F(k) = fᵀ(k, 0)` by inward integration.
pub fn integrate_jost_inward<P>(
    potential: P,
    momenta: &ChannelMomenta,
    grid: &RadialGrid,
    cfg: &OracleConfig,
) -> Result<JostMatrix>
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let result = jost_solution_at_origin(potential, momenta, grid, cfg)?;
    if !result.reliable {
        return Err(Error::Unreliable {
            estimated: result.estimated_error,
            tolerance: cfg.tolerance,
        });
    }
    Ok(JostMatrix::new(momenta.clone(), result.value.transpose()))
}

/// Jost solution `f(k, r)` at each requested radius in `(0, r_max]`, propagated inward
/// with the grid step. Output follows the input order.
pub fn jost_solution_profile<P>(
    potential: P,
    momenta: &ChannelMomenta,
    grid: &RadialGrid,
    radii: &[f64],
    cfg: &OracleConfig,
) -> Result<Vec<SolutionSample>>
where
    P: Fn(f64) -> DMatrix<f64>,
{
    if let Some(bad) = radii.iter().find(|&&r| !(r > 0.0 && r <= grid.r_max)) {
        return Err(Error::InvalidArgument(format!(
            "radius {bad} outside (0, {}]",
            grid.r_max
        )));
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));

    let k2 = squared_momenta(momenta);
    let mut state = asymptotic_seed(&potential, momenta, grid.r_max);
    let mut r = grid.r_max;
    let mut out: Vec<Option<SolutionSample>> = vec![None; radii.len()];
    for idx in order {
        let target = radii[idx];
        let steps = ((r - target) / grid.step).ceil() as usize;
        if steps > 0 {
            state = propagate(&potential, &k2, state, r, target, steps, cfg.overflow)?;
            r = target;
        }
        out[idx] = Some(SolutionSample {
            r: target,
            value: state.value.clone(),
            derivative: state.derivative.clone(),
        });
    }
    Ok(out.into_iter().map(|s| s.expect("every radius visited")).collect())
}

/// Regular solution `φ(0) = 0`, `φ′(0) = I` propagated outward to `grid.r_max()`.
pub fn integrate_regular_outward<P>(
    potential: P,
    momenta: &ChannelMomenta,
    grid: &RadialGrid,
    cfg: &OracleConfig,
) -> Result<IntegrationResult>
where
    P: Fn(f64) -> DMatrix<f64>,
{
    let n = momenta.len();
    let k2 = squared_momenta(momenta);
    let seed = State {
        value: CMatrix::zeros(n, n),
        derivative: CMatrix::identity(n, n),
    };
    let steps = (grid.r_max / grid.step).round().max(1.0) as usize;
    let coarse = propagate(&potential, &k2, seed.clone(), 0.0, grid.r_max, steps, cfg.overflow)?;
    let fine = propagate(&potential, &k2, seed, 0.0, grid.r_max, 2 * steps, cfg.overflow)?;
    let scale = coarse.value.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    let estimated_error = max_difference(&coarse.value, &fine.value);
    Ok(IntegrationResult {
        value: coarse.value,
        derivative: coarse.derivative,
        at: grid.r_max,
        estimated_error,
        reliable: estimated_error <= cfg.tolerance * scale,
    })
}

/// Entrywise discrepancy between two Jost matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub max_abs: f64,
    /// Relative to `max(|analytic|, 1e-3)`.
    pub max_rel: f64,
}

pub fn oracle_compare(analytic: &JostMatrix, numeric: &JostMatrix) -> Result<OracleReport> {
    if analytic.dim() != numeric.dim() {
        return Err(Error::DimensionMismatch {
            expected: analytic.dim(),
            found: numeric.dim(),
        });
    }
    let mut report = OracleReport {
        max_abs: 0.0,
        max_rel: 0.0,
    };
    for (a, b) in analytic.matrix.iter().zip(numeric.matrix.iter()) {
        let diff = (a - b).norm();
        report.max_abs = report.max_abs.max(diff);
        report.max_rel = report.max_rel.max(diff / a.norm().max(1e-3));
    }
    Ok(report)
}
