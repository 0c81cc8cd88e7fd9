//! Post-processing of PDE runs: front speeds, errors against the exact sharp
//! wave, the sharp/classical comparison and decay of perturbations.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{config, domain, Error, Result};
use crate::kinetics::Kinetics;
use crate::scheme::{exact_sharp_wave, run, EdgeSample, GridConfig, InitialData, Problem, SchemeKind, SnapshotSeries};

/// Fewest trajectory samples accepted by [`front_speed`].
pub const MIN_FIT_POINTS: usize = 10;

/// Least-squares line through an edge trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedFit {
    /// Leftward speed, i.e. minus the fitted slope of `x̂(t)`.
    pub speed: f64,
    pub intercept: f64,
    pub points: usize,
    pub rms_residual: f64,
}

/// Fits `x̂(t) ≈ a - c t` on `window = (t0, t1)` and returns `c`.
pub fn front_speed(trajectory: &[EdgeSample], window: (f64, f64)) -> Result<SpeedFit> {
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(config(format!("empty fit window [{t0}, {t1}]")));
    }
    let pts: Vec<(f64, f64)> = trajectory
        .iter()
        .filter(|s| s.t >= t0 && s.t <= t1)
        .map(|s| (s.t, s.x_hat))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let (mt, mx) = pts.iter().fold((0.0, 0.0), |(a, b), &(t, x)| (a + t / n, b + x / n));
    let (mut stt, mut stx) = (0.0, 0.0);
    for &(t, x) in &pts {
        stt += (t - mt) * (t - mt);
        stx += (t - mt) * (x - mx);
    }
    let slope = stx / stt;
    let intercept = mx - slope * mt;
    let ss: f64 = pts.iter().map(|&(t, x)| x - intercept - slope * t).map(|e| e * e).sum();
    Ok(SpeedFit {
        speed: -slope,
        intercept,
        points: pts.len(),
        rms_residual: libm::sqrt(ss / n),
    })
}

/// Default fit window `[T/2, T]`.
pub fn default_window(t_end: f64) -> (f64, f64) {
    (0.5 * t_end, t_end)
}

/// Grid norms of `u - u_exact`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub linf: f64,
    /// `(Σ e_j^2 dx)^(1/2)`.
    pub l2: f64,
}

/// The exact sharp wave is a solution only for Fisher–KPP with `p = q = 1`,
/// no delay and the unshifted sharp-wave initial data.
fn check_exact_case(problem: &Problem, initial: &InitialData) -> Result<()> {
    let fisher = matches!(problem.kinetics, Kinetics::FisherKpp { p, q } if p == 1.0 && q == 1.0);
    let data = matches!(initial, InitialData::SharpWave { shift } if *shift == 0.0);
    if !(fisher && problem.r == 0.0 && data) {
        return Err(domain(
            "exact solution is available only for fisher-kpp (p = q = 1), r = 0 and the sharp wave",
        ));
    }
    Ok(())
}

/// Error of grid values `u` at time `t` against `(1 - e^{(-x - t)/2})_+`.
pub fn error_vs_exact(
    problem: &Problem,
    grid: &GridConfig,
    initial: &InitialData,
    u: &[f64],
    t: f64,
) -> Result<ErrorNorms> {
    check_exact_case(problem, initial)?;
    if u.len() != grid.cells + 1 {
        return Err(config(format!(
            "expected {} grid values, got {}",
            grid.cells + 1,
            u.len()
        )));
    }
    let (mut linf, mut sq) = (0.0f64, 0.0);
    for (j, &v) in u.iter().enumerate() {
        let e = (v - exact_sharp_wave(t, grid.x(j))).abs();
        linf = linf.max(e);
        sq += e * e;
    }
    Ok(ErrorNorms {
        linf,
        l2: libm::sqrt(sq * grid.dx),
    })
}

/// Errors of one scheme at the comparison time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeReport {
    pub norms: ErrorNorms,
    pub edge: f64,
    /// `|edge + t|`.
    pub edge_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub t: f64,
    pub sharp: SchemeReport,
    pub classical: SchemeReport,
}

impl ComparisonReport {
    pub fn sharp_edge_better(&self) -> bool {
        self.sharp.edge_error < self.classical.edge_error
    }
}

/// Runs both schemes from the exact sharp wave up to `grid.t_end`.
pub fn scheme_comparison(problem: &Problem, grid: &GridConfig) -> Result<ComparisonReport> {
    let initial = InitialData::SharpWave { shift: 0.0 };
    check_exact_case(problem, &initial)?;
    let report = |kind| -> Result<(f64, SchemeReport)> {
        let series = run(problem, grid, |s, x| initial.eval(s, x), &[], kind)?;
        let last = series.trajectory.last().expect("trajectory is never empty");
        let norms = error_vs_exact(problem, grid, &initial, &series.final_state.u, last.t)?;
        Ok((
            last.t,
            SchemeReport {
                norms,
                edge: last.x_hat,
                edge_error: (last.x_hat + last.t).abs(),
            },
        ))
    };
    let (t, sharp) = report(SchemeKind::Sharp)?;
    let (_, classical) = report(SchemeKind::Classical)?;
    Ok(ComparisonReport { t, sharp, classical })
}

/// `sup_x |u_perturbed - u_base|` at whole times.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub times: Vec<f64>,
    pub deviation: Vec<f64>,
}

impl PerturbationReport {
    /// Whether the deviation never grows by more than `slack` between
    /// consecutive samples with `t >= from`.
    pub fn non_increasing_from(&self, from: f64, slack: f64) -> bool {
        let tail: Vec<f64> = self
            .times
            .iter()
            .zip(&self.deviation)
            .filter(|(t, _)| **t >= from - 1e-9)
            .map(|(_, d)| *d)
            .collect();
        tail.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn final_deviation(&self) -> f64 {
        self.deviation.last().copied().unwrap_or(0.0)
    }
}

/// Evolves the sharp wave and the wave plus `amplitude · sin(π(x-2)/20)` on
/// `[2, 42]`, comparing them at `t = 0, 1, ..., ⌊T⌋`.
pub fn perturbation_decay(problem: &Problem, grid: &GridConfig, amplitude: f64) -> Result<PerturbationReport> {
    let times: Vec<f64> = (0..=libm::floor(grid.t_end + 1e-9) as usize)
        .map(|i| i as f64)
        .collect();
    let base_data = InitialData::SharpWave { shift: 0.0 };
    let pert_data = InitialData::Perturbed { amplitude };
    let base = run(problem, grid, |s, x| base_data.eval(s, x), &times, SchemeKind::Sharp)?;
    let pert = run(problem, grid, |s, x| pert_data.eval(s, x), &times, SchemeKind::Sharp)?;
    let deviation = base
        .snapshots
        .iter()
        .zip(&pert.snapshots)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        .collect();
    Ok(PerturbationReport {
        times: base.times,
        deviation,
    })
}

/// Structural properties of a sharp-scheme run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    pub min_value: f64,
    pub max_clamped: f64,
    pub support_violations: usize,
    /// Largest rightward move of the edge between steps.
    pub max_edge_advance: f64,
    pub fallbacks: usize,
}

impl StructureReport {
    /// Non-negative values, zero left of the edge, edge never moving right
    /// by more than `edge_slack`, clamping below `clamp_tol`.
    pub fn holds(&self, edge_slack: f64, clamp_tol: f64) -> bool {
        self.min_value >= 0.0
            && self.support_violations == 0
            && self.max_edge_advance <= edge_slack
            && self.max_clamped <= clamp_tol
    }
}

pub fn structure(series: &SnapshotSeries) -> StructureReport {
    let d = &series.diagnostics;
    let max_edge_advance = series
        .trajectory
        .windows(2)
        .map(|w| w[1].x_hat - w[0].x_hat)
        .fold(f64::NEG_INFINITY, f64::max);
    StructureReport {
        min_value: d.min_value,
        max_clamped: d.max_clamped,
        support_violations: d.support_violations,
        max_edge_advance,
        fallbacks: d.fallbacks,
    }
}
