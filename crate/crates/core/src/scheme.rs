//! Explicit edge-tracking scheme for `u_t = (u^2)_xx - d(u) + b(u(t - r, x))`.
//!
//! The support of the solution starts at an edge point `x̂ ∈ (x_{k-1}, x_k]`.
//! Grid values left of cell `k` are exactly zero. Right of `k` the classical
//! three-point difference of `u^2` is used. At `x_k` itself `(u^2)_xx` comes
//! from the local profile `u ≈ c1 (x - x̂)_+ + c2 (x - x̂)_+^2`, whose square
//! has second derivative `2 c1^2 + 12 c1 c2 (x - x̂)_+` to leading order.
//! After each update the profile is refitted through the three new values at
//! `x_k, x_{k+1}, x_{k+2}`, which relocates `x̂`; when the edge passes
//! `x_{k-1}` that cell is filled from the profile and becomes the new `k`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, domain, Error, Result};
use crate::kinetics::{delay_steps, steps_to_reach, Kinetics, DEFAULT_KAPPA_TOL, DEFAULT_SCAN_MAX};

pub const DEFAULT_CFL: f64 = 0.45;
pub const DEFAULT_DX: f64 = 0.05;
pub const DEFAULT_X_MIN: f64 = -15.0;
pub const DEFAULT_X_MAX: f64 = 60.0;
pub const DEFAULT_T_END: f64 = 10.0;
/// Grid values at or below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-14;
const COEFF_EPS: f64 = 1e-12;

/// Equation data for the `m = 2` scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub kinetics: Kinetics,
    pub kappa: f64,
    pub m: f64,
    pub r: f64,
}

impl Problem {
    pub fn new(kinetics: Kinetics, r: f64) -> Result<Self> {
        Self::with_exponent(kinetics, 2.0, r)
    }

    /// Only `m = 2` is supported by the scheme; other exponents are rejected.
    pub fn with_exponent(kinetics: Kinetics, m: f64, r: f64) -> Result<Self> {
        if m != 2.0 {
            return Err(config(format!("the edge-tracking scheme requires m = 2, got {m}")));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(config(format!("delay must be non-negative, got {r}")));
        }
        let kappa = kinetics.carrying_capacity(DEFAULT_SCAN_MAX, DEFAULT_KAPPA_TOL)?.kappa;
        Ok(Self { kinetics, kappa, m, r })
    }
}

/// Uniform grid and time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
    pub cfl: f64,
    /// Number of cells; grid points are `0..=cells`.
    pub cells: usize,
    /// `r / dt`.
    pub delay_steps: usize,
}

impl GridConfig {
    /// Picks `dt = cfl dx^2 / (2 m κ^(m-1))`, reduced so that `r / dt` is an integer.
    pub fn new(problem: &Problem, x_min: f64, x_max: f64, dx: f64, cfl: f64, t_end: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(config(format!("cfl must lie in (0, 1], got {cfl}")));
        }
        let dt_max = cfl * Self::stability_bound(problem, dx)?;
        let dt = if problem.r > 0.0 {
            problem.r / libm::ceil(problem.r / dt_max * (1.0 - 1e-12))
        } else {
            dt_max
        };
        Self::build(problem, x_min, x_max, dx, dt, cfl, t_end)
    }

    /// Uses a caller-chosen `dt`, rejected if it exceeds `cfl` times the
    /// stability bound or does not divide the delay.
    pub fn with_dt(problem: &Problem, x_min: f64, x_max: f64, dx: f64, dt: f64, cfl: f64, t_end: f64) -> Result<Self> {
        let limit = cfl * Self::stability_bound(problem, dx)?;
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(config(format!("dt = {dt} violates the CFL bound {limit}")));
        }
        Self::build(problem, x_min, x_max, dx, dt, cfl, t_end)
    }

    fn stability_bound(problem: &Problem, dx: f64) -> Result<f64> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(config(format!("dx must be positive, got {dx}")));
        }
        Ok(dx * dx / (2.0 * problem.m * libm::pow(problem.kappa, problem.m - 1.0)))
    }

    fn build(problem: &Problem, x_min: f64, x_max: f64, dx: f64, dt: f64, cfl: f64, t_end: f64) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(config("x_max must exceed x_min"));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(config("T must be non-negative"));
        }
        let span = (x_max - x_min) / dx;
        let cells = libm::round(span);
        if (span - cells).abs() > 1e-9 * span.max(1.0) || cells < 4.0 {
            return Err(config(format!(
                "domain length {} is not a whole number (>= 4) of cells of size {dx}",
                x_max - x_min
            )));
        }
        let delay_steps = delay_steps(problem.r, dt)?;
        Ok(Self {
            x_min,
            x_max,
            dx,
            dt,
            t_end,
            cfl,
            cells: cells as usize,
            delay_steps,
        })
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.cells).map(|j| self.x(j)).collect()
    }

    pub fn steps(&self) -> usize {
        steps_to_reach(self.t_end, self.dt)
    }
}

/// Which spatial discretization to use near the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Edge tracking with the local profile.
    Sharp,
    /// Three-point differences everywhere, negative values clamped.
    Classical,
}

/// Tracked free boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    /// Leftmost cell of the support.
    pub k: usize,
    pub x_hat: f64,
    pub c1: f64,
    pub c2: f64,
}

impl EdgeState {
    /// Whether `x̂ ∈ (x_{k-1}, x_k]` and the values left of `k` vanish.
    pub fn is_consistent(&self, grid: &GridConfig, u: &[f64]) -> bool {
        self.k >= 1
            && self.x_hat > grid.x(self.k - 1)
            && self.x_hat <= grid.x(self.k)
            && u[..self.k].iter().all(|&v| v <= ZERO_TOL)
    }

    /// Value of the local profile at `x`.
    pub fn profile(&self, x: f64) -> f64 {
        let s = (x - self.x_hat).max(0.0);
        self.c1 * s + self.c2 * s * s
    }
}

/// Least-squares profile coefficients with the edge held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFit {
    pub c1: f64,
    pub c2: f64,
    /// Largest absolute misfit over the three points.
    pub residual: f64,
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    /// Sum of magnitudes of negative values set to zero.
    pub clamped: f64,
    pub fit_residual: f64,
    /// The refit had no admissible root and the edge was extrapolated.
    pub fallback: bool,
    /// The edge moved into the next cell to the left.
    pub crossed: bool,
}

/// Solution at one time level together with its delay memory.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub step: usize,
    pub u: Vec<f64>,
    pub edge: Option<EdgeState>,
    /// Levels `t - D dt, ..., t - dt`, oldest first.
    pub history: VecDeque<Vec<f64>>,
    pub last: StepDiagnostics,
    left_value: f64,
    right_value: f64,
    last_shift: f64,
    scratch: Vec<f64>,
}

impl FieldState {
    /// The level `u(t - r, ·)` used by the birth term.
    pub fn delayed_level(&self) -> &[f64] {
        self.history.front().map_or(&self.u, |v| v.as_slice())
    }
}

/// Index of the first value above [`ZERO_TOL`]. A value of exactly zero at
/// `x_{k-1}` with `x̂ = x_{k-1}` is also admissible; see [`EdgeState::is_consistent`].
pub fn detect_edge(u: &[f64]) -> Result<usize> {
    let p = u.iter().position(|&v| v > ZERO_TOL).ok_or(Error::NoEdge)?;
    if p == 0 {
        return Err(Error::EdgeLeftDomain);
    }
    Ok(p)
}

/// Fits `u_j = c1 d_j + c2 d_j^2` at `d_j = d_k + i dx`, `i = 0, 1, 2`, in the
/// least-squares sense.
pub fn fit_edge_coeffs(values: [f64; 3], d_k: f64, dx: f64) -> Result<EdgeFit> {
    let d = [d_k, d_k + dx, d_k + 2.0 * dx];
    let (mut s2, mut s3, mut s4, mut su1, mut su2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&di, &ui) in d.iter().zip(&values) {
        let di2 = di * di;
        s2 += di2;
        s3 += di2 * di;
        s4 += di2 * di2;
        su1 += di * ui;
        su2 += di2 * ui;
    }
    let det = s2 * s4 - s3 * s3;
    if !(det.abs() > f64::EPSILON * s2 * s4) {
        return Err(Error::Numerical(format!("singular edge fit (d_k = {d_k}, dx = {dx})")));
    }
    let c1 = (su1 * s4 - s3 * su2) / det;
    let c2 = (s2 * su2 - s3 * su1) / det;
    let residual = d
        .iter()
        .zip(&values)
        .map(|(&di, &ui)| (c1 * di + c2 * di * di - ui).abs())
        .fold(0.0, f64::max);
    Ok(EdgeFit { c1, c2, residual })
}

/// `(u^2)_xx` at `x_k` from the local profile, with `d_k = (x_k - x̂)_+`.
#[inline]
pub fn edge_second_derivative(c1: f64, c2: f64, d_k: f64) -> f64 {
    2.0 * c1 * c1 + 12.0 * c1 * c2 * d_k
}

/// Three-point difference of `u^2` at an interior point.
pub fn interior_laplacian(u: &[f64], j: usize, dx: f64) -> Result<f64> {
    if j == 0 || j + 1 >= u.len() {
        return Err(domain(format!(
            "index {j} is not interior to a grid of {} points",
            u.len()
        )));
    }
    Ok(laplacian(u, j, dx * dx))
}

#[inline]
fn laplacian(u: &[f64], j: usize, dx2: f64) -> f64 {
    let (a, b, c) = (u[j - 1], u[j], u[j + 1]);
    (c * c + a * a - 2.0 * b * b) / dx2
}

/// Edge offset and profile coefficients through three values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSolve {
    /// `x_k - x̂`.
    pub offset: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Solves `u_{k+i} = c1 (d + i dx) + c2 (d + i dx)^2`, `i = 0, 1, 2`, for
/// `(d, c1, c2)` in closed form, taking the smallest non-negative root `d`.
/// Returns `None` if no such root exists.
pub fn solve_edge(values: [f64; 3], dx: f64) -> Option<EdgeSolve> {
    let [u0, u1, u2] = values;
    if u0 <= ZERO_TOL {
        // Edge on the grid point; exact fit through the other two values.
        let c2 = (u2 - 2.0 * u1) / (2.0 * dx * dx);
        let c1 = (4.0 * u1 - u2) / (2.0 * dx);
        return Some(EdgeSolve { offset: 0.0, c1, c2 });
    }
    let c2 = (u2 - 2.0 * u1 + u0) / (2.0 * dx * dx);
    let slope = (u1 - u0) / dx - c2 * dx;
    let offset = if c2.abs() < COEFF_EPS {
        if slope <= 0.0 {
            return None;
        }
        u0 / slope
    } else {
        // c2 d^2 - slope d + u0 = 0
        let mut disc = slope * slope - 4.0 * c2 * u0;
        if disc < 0.0 && disc > -1e-10 * slope * slope {
            // Double root (c1 ≈ 0) perturbed by rounding.
            disc = 0.0;
        }
        if disc < 0.0 {
            return None;
        }
        let q = 0.5 * (slope + libm::copysign(libm::sqrt(disc), slope));
        let roots = [q / c2, if q != 0.0 { u0 / q } else { f64::NAN }];
        roots
            .into_iter()
            .filter(|d| d.is_finite() && *d >= 0.0)
            .fold(None, |best: Option<f64>, d| Some(best.map_or(d, |b| b.min(d))))?
    };
    Some(EdgeSolve {
        offset,
        c1: slope - 2.0 * c2 * offset,
        c2,
    })
}

/// Relocates the edge from the new values at `x_k, x_{k+1}, x_{k+2}`.
///
/// Without an admissible root in `[0, 2 dx]` the previous edge is advanced by
/// the previous displacement and the coefficients are fitted by least squares;
/// the second return value flags that fallback.
pub fn refit_edge(
    values: [f64; 3],
    k: usize,
    x_k: f64,
    dx: f64,
    previous: &EdgeState,
    last_shift: f64,
) -> Result<(EdgeState, bool)> {
    if let Some(sol) = solve_edge(values, dx) {
        if sol.offset <= 2.0 * dx {
            let edge = EdgeState {
                k,
                x_hat: x_k - sol.offset,
                c1: sol.c1,
                c2: sol.c2,
            };
            return Ok((edge, false));
        }
    }
    let x_hat = previous.x_hat + last_shift;
    let offset = (x_k - x_hat).clamp(0.0, 2.0 * dx);
    let fit = fit_edge_coeffs(values, offset, dx)?;
    Ok((
        EdgeState {
            k,
            x_hat: x_k - offset,
            c1: fit.c1,
            c2: fit.c2,
        },
        true,
    ))
}

/// Built-in initial histories (constant in `s ∈ [-r, 0]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `(1 - e^{-(x - shift)/2})_+`.
    SharpWave {
        shift: f64,
    },
    /// Sharp wave plus `amplitude · sin(π (x - 2) / 20)` on `[2, 42]`.
    Perturbed {
        amplitude: f64,
    },
    Constant(f64),
}

impl InitialData {
    pub fn eval(&self, _s: f64, x: f64) -> f64 {
        match *self {
            InitialData::SharpWave { shift } => sharp_wave(x - shift),
            InitialData::Perturbed { amplitude } => {
                let bump = if (2.0..=42.0).contains(&x) {
                    amplitude * libm::sin(core::f64::consts::PI * (x - 2.0) / 20.0)
                } else {
                    0.0
                };
                sharp_wave(x) + bump
            }
            InitialData::Constant(v) => v,
        }
    }
}

/// `(1 - e^{-x/2})_+`.
#[inline]
pub fn sharp_wave(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -libm::expm1(-0.5 * x)
    }
}

/// The traveling solution `(1 - e^{(-x - t)/2})_+` of `u_t = (u^2)_xx + u - u^2`.
#[inline]
pub fn exact_sharp_wave(t: f64, x: f64) -> f64 {
    sharp_wave(x + t)
}

/// Samples the initial history on the grid and locates the edge.
pub fn initialize<F>(problem: &Problem, grid: &GridConfig, u0: F) -> Result<FieldState>
where
    F: Fn(f64, f64) -> f64,
{
    let sample = |s: f64| -> Result<Vec<f64>> {
        let level: Vec<f64> = (0..=grid.cells).map(|j| u0(s, grid.x(j))).collect();
        if let Some(j) = level.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Input(format!(
                "initial data must be finite and non-negative (u0({s}, {}) = {})",
                grid.x(j),
                level[j]
            )));
        }
        Ok(level)
    };
    let mut u = sample(0.0)?;
    let mut history = VecDeque::with_capacity(grid.delay_steps);
    for lvl in (1..=grid.delay_steps).rev() {
        history.push_back(sample(-(lvl as f64) * grid.dt)?);
    }
    let edge = if u[0] > ZERO_TOL {
        None
    } else {
        Some(locate_initial_edge(grid, &mut u)?)
    };
    let _ = problem;
    Ok(FieldState {
        t: 0.0,
        step: 0,
        left_value: u[0],
        right_value: u[grid.cells],
        edge,
        history,
        last: StepDiagnostics::default(),
        last_shift: 0.0,
        scratch: vec![0.0; u.len()],
        u,
    })
}

fn locate_initial_edge(grid: &GridConfig, u: &mut [f64]) -> Result<EdgeState> {
    let p = detect_edge(u)?;
    if p + 2 > grid.cells {
        return Err(Error::Input("support is narrower than three grid points".into()));
    }
    let values = [u[p], u[p + 1], u[p + 2]];
    let dx = grid.dx;
    let mut offset = match solve_edge(values, dx) {
        Some(sol) if sol.offset <= 2.0 * dx => sol.offset,
        _ => (u[p] * dx / (u[p + 1] - u[p])).clamp(0.0, dx),
    };
    let mut k = p;
    if offset >= dx {
        // The edge lies at or left of x_{p-1}: that point joins the support.
        k = p - 1;
        offset -= dx;
        if k == 0 {
            return Err(Error::EdgeLeftDomain);
        }
    }
    for v in &mut u[..k] {
        *v = 0.0;
    }
    let fit = fit_edge_coeffs([u[k], u[k + 1], u[k + 2]], offset, dx)?;
    let edge = EdgeState {
        k,
        x_hat: grid.x(k) - offset,
        c1: fit.c1,
        c2: fit.c2,
    };
    if k < p {
        u[k] = edge.profile(grid.x(k)).max(0.0);
    }
    Ok(edge)
}

/// Advances `state` by one time step.
pub fn step(state: &mut FieldState, problem: &Problem, grid: &GridConfig, kind: SchemeKind) -> Result<()> {
    let n = grid.cells;
    let dt = grid.dt;
    let dx2 = grid.dx * grid.dx;
    let kin = &problem.kinetics;
    let mut diag = StepDiagnostics::default();

    let mut next = core::mem::take(&mut state.scratch);
    next.resize(n + 1, 0.0);
    {
        let u = &state.u;
        let delayed = state.delayed_level();
        let react = |j: usize| -kin.death(u[j]) + kin.birth(delayed[j]);
        let first_interior = match (kind, state.edge) {
            (SchemeKind::Sharp, Some(edge)) => {
                let k = edge.k;
                if k + 2 > n {
                    return Err(Error::Numerical("edge reached the right boundary".into()));
                }
                next[..k].fill(0.0);
                let d_k = (grid.x(k) - edge.x_hat).max(0.0);
                let fit = fit_edge_coeffs([u[k], u[k + 1], u[k + 2]], d_k, grid.dx)?;
                diag.fit_residual = fit.residual;
                next[k] = u[k] + dt * (edge_second_derivative(fit.c1, fit.c2, d_k) + react(k));
                k + 1
            }
            _ => {
                next[0] = state.left_value;
                1
            }
        };
        for j in first_interior..n {
            next[j] = u[j] + dt * (laplacian(u, j, dx2) + react(j));
        }
        next[n] = state.right_value;
    }
    for v in next.iter_mut() {
        if *v < 0.0 {
            diag.clamped += -*v;
            *v = 0.0;
        }
    }

    if let (SchemeKind::Sharp, Some(edge)) = (kind, state.edge) {
        let k = edge.k;
        let values = [next[k], next[k + 1], next[k + 2]];
        if !(values[1] > 0.0 && values[2] > 0.0) {
            return Err(Error::Numerical(format!(
                "support collapsed next to the edge at t = {}",
                state.t
            )));
        }
        let (mut new_edge, fallback) = refit_edge(values, k, grid.x(k), grid.dx, &edge, state.last_shift)?;
        diag.fallback = fallback;
        if grid.x(k) - new_edge.x_hat >= grid.dx {
            if k == 1 {
                return Err(Error::EdgeLeftDomain);
            }
            new_edge.k = k - 1;
            next[k - 1] = new_edge.profile(grid.x(k - 1));
            diag.crossed = true;
        }
        debug_assert!(new_edge.x_hat > grid.x(new_edge.k - 1) - 1e-12);
        state.last_shift = new_edge.x_hat - edge.x_hat;
        state.edge = Some(new_edge);
    }

    // Rotate the delay memory: the current level becomes the newest entry.
    let current = core::mem::replace(&mut state.u, next);
    state.scratch = if grid.delay_steps > 0 {
        state.history.push_back(current);
        state.history.pop_front().expect("history holds D levels")
    } else {
        current
    };
    state.step += 1;
    state.t = state.step as f64 * dt;
    state.last = diag;
    Ok(())
}

/// Position of the left end of the support as the state sees it: the tracked
/// edge for the sharp scheme, the first value above [`ZERO_TOL`] otherwise.
pub fn front_position(state: &FieldState, grid: &GridConfig, kind: SchemeKind) -> f64 {
    match (kind, state.edge) {
        (SchemeKind::Sharp, Some(edge)) => edge.x_hat,
        _ => state
            .u
            .iter()
            .position(|&v| v > ZERO_TOL)
            .map_or(grid.x_max, |j| grid.x(j)),
    }
}

/// One row of the edge trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSample {
    pub t: f64,
    pub x_hat: f64,
    pub c1: f64,
    pub c2: f64,
    pub k: usize,
}

fn edge_sample(state: &FieldState, grid: &GridConfig, kind: SchemeKind) -> EdgeSample {
    let x_hat = front_position(state, grid, kind);
    match (kind, state.edge) {
        (SchemeKind::Sharp, Some(e)) => EdgeSample {
            t: state.t,
            x_hat,
            c1: e.c1,
            c2: e.c2,
            k: e.k,
        },
        _ => EdgeSample {
            t: state.t,
            x_hat,
            c1: 0.0,
            c2: 0.0,
            k: libm::round((x_hat - grid.x_min) / grid.dx) as usize,
        },
    }
}

/// Aggregate checks over a whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunDiagnostics {
    pub steps: usize,
    /// Largest per-step clamped magnitude.
    pub max_clamped: f64,
    pub min_value: f64,
    pub max_fit_residual: f64,
    pub fallbacks: usize,
    pub crossings: usize,
    /// Steps at which a value left of the edge was nonzero.
    pub support_violations: usize,
}

/// Grid dumps at requested times plus the edge trajectory at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub x: Vec<f64>,
    /// Requested snapshot times.
    pub requested: Vec<f64>,
    /// Step times at which the snapshots were taken.
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub trajectory: Vec<EdgeSample>,
    pub diagnostics: RunDiagnostics,
    pub final_state: FieldState,
}

/// Steps from `t = 0` to `T`, recording snapshots at the steps nearest to
/// `snapshot_times`.
pub fn run<F>(
    problem: &Problem,
    grid: &GridConfig,
    u0: F,
    snapshot_times: &[f64],
    kind: SchemeKind,
) -> Result<SnapshotSeries>
where
    F: Fn(f64, f64) -> f64,
{
    let n_steps = grid.steps();
    let mut requested: Vec<f64> = snapshot_times.to_vec();
    if requested
        .iter()
        .any(|t| !(*t >= 0.0) || *t > n_steps as f64 * grid.dt + 1e-12)
    {
        return Err(config("snapshot times must lie in [0, T]"));
    }
    requested.sort_by(f64::total_cmp);
    requested.dedup();
    let targets: Vec<usize> = requested.iter().map(|t| libm::round(t / grid.dt) as usize).collect();

    let mut state = initialize(problem, grid, u0)?;
    let mut series = SnapshotSeries {
        x: grid.points(),
        requested,
        times: Vec::with_capacity(targets.len()),
        snapshots: Vec::with_capacity(targets.len()),
        trajectory: Vec::with_capacity(n_steps + 1),
        diagnostics: RunDiagnostics {
            min_value: f64::INFINITY,
            ..Default::default()
        },
        final_state: state.clone(),
    };
    let mut next_target = 0;
    let mut record = |state: &FieldState, series: &mut SnapshotSeries| {
        while next_target < targets.len() && targets[next_target] == state.step {
            series.times.push(state.t);
            series.snapshots.push(state.u.clone());
            next_target += 1;
        }
        series.trajectory.push(edge_sample(state, grid, kind));
        let d = &mut series.diagnostics;
        d.max_clamped = d.max_clamped.max(state.last.clamped);
        d.max_fit_residual = d.max_fit_residual.max(state.last.fit_residual);
        d.min_value = state.u.iter().copied().fold(d.min_value, f64::min);
        d.fallbacks += state.last.fallback as usize;
        d.crossings += state.last.crossed as usize;
        if let (SchemeKind::Sharp, Some(edge)) = (kind, state.edge) {
            if state.u[..edge.k].iter().any(|&v| v != 0.0) {
                d.support_violations += 1;
            }
        }
    };
    record(&state, &mut series);
    for _ in 0..n_steps {
        step(&mut state, problem, grid, kind)?;
        record(&state, &mut series);
    }
    series.diagnostics.steps = n_steps;
    series.final_state = state;
    Ok(series)
}
