use std::path::{Path, PathBuf};
use std::time::Instant;

use sharpfront::analysis::{front_speed, perturbation_decay, scheme_comparison, SpeedFit};
use sharpfront::kinetics::{DEFAULT_KAPPA_TOL, DEFAULT_SCAN_MAX, DEFAULT_VALIDATE_SAMPLES};
use sharpfront::scheme::{run, GridConfig, Problem, SchemeKind, SnapshotSeries};
use sharpfront::shooting::{ShootingOptions, SpeedBracket, WaveEquation};

use crate::config::{Config, Scheme};
use crate::error::{usage, CliError, Result};
use crate::output::{ensure_dir, num, suffixed, time_tag, write_csv};

pub struct Ctx {
    pub cfg: Config,
    pub out: PathBuf,
    pub quiet: bool,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn problem(cfg: &Config, r: f64) -> Result<Problem> {
    Ok(Problem::with_exponent(cfg.kinetics()?, cfg.m, r)?)
}

fn grid(cfg: &Config, p: &Problem, t_end: f64) -> Result<GridConfig> {
    let g = match cfg.dt {
        Some(dt) => GridConfig::with_dt(p, cfg.x_min, cfg.x_max, cfg.dx, dt, cfg.cfl, t_end)?,
        None => GridConfig::new(p, cfg.x_min, cfg.x_max, cfg.dx, cfg.cfl, t_end)?,
    };
    Ok(g)
}

fn kind(cfg: &Config) -> SchemeKind {
    match cfg.scheme {
        Scheme::Sharp => SchemeKind::Sharp,
        Scheme::Classical => SchemeKind::Classical,
    }
}

fn wave_equation(cfg: &Config, r: f64) -> Result<WaveEquation> {
    let kin = cfg.kinetics()?;
    let kappa = kin.carrying_capacity(DEFAULT_SCAN_MAX, DEFAULT_KAPPA_TOL)?.kappa;
    let opts = ShootingOptions {
        phi0_rel: cfg.phi0,
        rtol: cfg.rtol,
        ..Default::default()
    };
    Ok(WaveEquation::new(cfg.m, r, kin, kappa)?.with_options(opts))
}

fn simulate_run(cfg: &Config, r: f64) -> Result<(GridConfig, SnapshotSeries)> {
    let p = problem(cfg, r)?;
    let g = grid(cfg, &p, cfg.t_end)?;
    let init = cfg.initial;
    let series = run(&p, &g, |s, x| init.eval(s, x), &cfg.snapshots(), kind(cfg))?;
    Ok((g, series))
}

fn write_edge(path: PathBuf, series: &SnapshotSeries) -> Result<PathBuf> {
    let rows = series
        .trajectory
        .iter()
        .map(|s| [num(s.t), num(s.x_hat), num(s.c1), num(s.c2), s.k.to_string()]);
    write_csv(path, &["t", "x_hat", "c1", "c2", "k"], rows)
}

fn write_outputs(ctx: &Ctx, series: &SnapshotSeries, tag: &str) -> Result<()> {
    let suffix = match ctx.cfg.scheme {
        Scheme::Sharp => tag.to_string(),
        Scheme::Classical => format!("{tag}_classical"),
    };
    for (t, u) in series.requested.iter().zip(&series.snapshots) {
        let name = suffixed(&format!("snap_t{}.csv", time_tag(*t)), &suffix);
        let rows = series.x.iter().zip(u).map(|(x, v)| [num(*x), num(*v)]);
        write_csv(ctx.path(&name), &["x", "u"], rows)?;
    }
    write_edge(ctx.path(&suffixed("edge.csv", &suffix)), series)?;
    Ok(())
}

pub fn simulate(ctx: &Ctx) -> Result<()> {
    let (g, series) = simulate_run(&ctx.cfg, ctx.cfg.r)?;
    write_outputs(ctx, &series, "")?;
    let last = series.trajectory.last().expect("trajectory is never empty");
    let d = &series.diagnostics;
    ctx.say(format!(
        "t = {:.6}  x_hat = {:.6}  steps = {}  dt = {:.3e}  fallbacks = {}  max clamped = {:.1e}",
        last.t, last.x_hat, d.steps, g.dt, d.fallbacks, d.max_clamped
    ));
    Ok(())
}

fn shoot(cfg: &Config, r: f64) -> Result<(WaveEquation, SpeedBracket)> {
    let eq = wave_equation(cfg, r)?;
    let bracket = eq.critical_speed(cfg.tol, cfg.xi_max)?;
    Ok((eq, bracket))
}

pub fn wavespeed(ctx: &Ctx) -> Result<()> {
    let (eq, bracket) = shoot(&ctx.cfg, ctx.cfg.r)?;
    let rows = bracket.steps.iter().map(|s| {
        [
            s.iter.to_string(),
            num(s.c_lo),
            num(s.c_hi),
            s.mid_class.as_str().to_string(),
        ]
    });
    write_csv(
        ctx.path("wavespeed.csv"),
        &["iter", "c_lo", "c_hi", "classification_mid"],
        rows,
    )?;
    let profile = eq.integrate_profile(bracket.c_hi, bracket.xi_max)?;
    let rows = (0..profile.xi.len()).map(|i| [num(profile.xi[i]), num(profile.phi[i]), num(profile.psi[i])]);
    write_csv(ctx.path("profile.csv"), &["xi", "phi", "psi"], rows)?;
    ctx.say(format!(
        "c* = {:.4}  bracket [{:.6}, {:.6}]  resolved = {}",
        bracket.midpoint(),
        bracket.c_lo,
        bracket.c_hi,
        bracket.resolved
    ));
    if !bracket.resolved {
        return Err(CliError::Solver(sharpfront::Error::Numerical(
            "bisection stopped on an undecided speed".into(),
        )));
    }
    Ok(())
}

fn fit(cfg: &Config, series: &SnapshotSeries) -> Result<SpeedFit> {
    Ok(front_speed(&series.trajectory, cfg.window(cfg.t_end))?)
}

pub fn frontspeed(ctx: &Ctx) -> Result<()> {
    let (_, series) = simulate_run(&ctx.cfg, ctx.cfg.r)?;
    write_outputs(ctx, &series, "")?;
    let f = fit(&ctx.cfg, &series)?;
    let (a, b) = ctx.cfg.window(ctx.cfg.t_end);
    write_csv(
        ctx.path("frontspeed.csv"),
        &[
            "speed",
            "intercept",
            "rms_residual",
            "window_start",
            "window_end",
            "points",
        ],
        [[
            num(f.speed),
            num(f.intercept),
            num(f.rms_residual),
            num(a),
            num(b),
            f.points.to_string(),
        ]],
    )?;
    ctx.say(format!(
        "speed = {:.4}  rms residual = {:.2e}  points = {}",
        f.speed, f.rms_residual, f.points
    ));
    Ok(())
}

struct SweepRow {
    r: f64,
    pde: f64,
    ode: f64,
}

fn sweep_one(ctx: &Ctx, r: f64) -> Result<SweepRow> {
    let (_, series) = simulate_run(&ctx.cfg, r)?;
    write_edge(ctx.path(&format!("edge_r{}.csv", time_tag(r))), &series)?;
    let pde = fit(&ctx.cfg, &series)?.speed;
    let ode = shoot(&ctx.cfg, r)?.1.midpoint();
    Ok(SweepRow { r, pde, ode })
}

pub fn sweep(ctx: &Ctx) -> Result<()> {
    let mut delays = ctx.cfg.r_list.clone();
    if delays.is_empty() {
        return Err(usage("r_list is empty"));
    }
    delays.sort_by(f64::total_cmp);
    delays.dedup();
    let results: Vec<Result<SweepRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = delays.iter().map(|&r| s.spawn(move || sweep_one(ctx, r))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut rows = Vec::new();
    let mut first_err = None;
    for (r, res) in delays.iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("r = {r}: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    write_csv(
        ctx.path("sweep.csv"),
        &["r", "speed_pde", "speed_ode", "abs_diff"],
        rows.iter()
            .map(|w| [num(w.r), num(w.pde), num(w.ode), num((w.pde - w.ode).abs())]),
    )?;
    for w in &rows {
        ctx.say(format!(
            "r = {:<5} pde {:.4}  ode {:.4}  |diff| {:.1e}",
            w.r,
            w.pde,
            w.ode,
            (w.pde - w.ode).abs()
        ));
    }
    if let Some(e) = first_err {
        return Err(e);
    }
    let decreasing = |f: fn(&SweepRow) -> f64| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    if !decreasing(|w| w.pde) || !decreasing(|w| w.ode) {
        return Err(CliError::Check("speeds do not strictly decrease with r".into()));
    }
    if let Some(w) = rows.iter().find(|w| (w.pde - w.ode).abs() > ctx.cfg.sweep_max_diff) {
        return Err(CliError::Check(format!(
            "r = {}: |speed_pde - speed_ode| exceeds {}",
            w.r, ctx.cfg.sweep_max_diff
        )));
    }
    Ok(())
}

pub fn perturb(ctx: &Ctx) -> Result<()> {
    let p = problem(&ctx.cfg, ctx.cfg.r)?;
    let g = grid(&ctx.cfg, &p, ctx.cfg.t_end)?;
    let rep = perturbation_decay(&p, &g, ctx.cfg.perturb_amplitude)?;
    write_csv(
        ctx.path("perturbation.csv"),
        &["t", "deviation"],
        rep.times.iter().zip(&rep.deviation).map(|(t, d)| [num(*t), num(*d)]),
    )?;
    let last = rep.final_deviation();
    ctx.say(format!(
        "deviation at t = {}: {:.3e}  non-increasing from t = 1: {}",
        rep.times.last().copied().unwrap_or(0.0),
        last,
        rep.non_increasing_from(1.0, 0.0)
    ));
    if last > ctx.cfg.perturb_bound {
        return Err(CliError::Check(format!(
            "final deviation {last:.3e} exceeds {}",
            ctx.cfg.perturb_bound
        )));
    }
    Ok(())
}

pub fn compare(ctx: &Ctx) -> Result<()> {
    let p = problem(&ctx.cfg, ctx.cfg.r)?;
    let g = grid(&ctx.cfg, &p, ctx.cfg.compare_t)?;
    let rep = scheme_comparison(&p, &g)?;
    let rows = [("sharp", rep.sharp), ("classical", rep.classical)].map(|(name, s)| {
        [
            name.to_string(),
            num(rep.t),
            num(s.norms.linf),
            num(s.norms.l2),
            num(s.edge),
            num(s.edge_error),
        ]
    });
    write_csv(
        ctx.path("compare.csv"),
        &["scheme", "t", "linf", "l2", "edge", "edge_error"],
        rows,
    )?;
    ctx.say(format!(
        "t = {:.3}  edge error: sharp {:.3e}, classical {:.3e}  L∞: sharp {:.3e}, classical {:.3e}",
        rep.t, rep.sharp.edge_error, rep.classical.edge_error, rep.sharp.norms.linf, rep.classical.norms.linf
    ));
    if !rep.sharp_edge_better() {
        return Err(CliError::Check(
            "sharp edge error is not below the classical one".into(),
        ));
    }
    Ok(())
}

pub fn validate(ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let kin = cfg.kinetics()?;
    let violations = kin.validate(DEFAULT_SCAN_MAX, DEFAULT_VALIDATE_SAMPLES);
    for v in &violations {
        eprintln!("violation: {v}");
    }
    if !violations.is_empty() {
        return Err(CliError::Check(format!(
            "{} kinetics check(s) failed",
            violations.len()
        )));
    }
    let kappa = kin.carrying_capacity(DEFAULT_SCAN_MAX, DEFAULT_KAPPA_TOL)?.kappa;
    let traj = kin.homogeneous_dynamics(cfg.r, cfg.validate_u0, cfg.validate_t, cfg.validate_dt)?;
    write_csv(
        ctx.path("homogeneous.csv"),
        &["t", "U"],
        traj.t.iter().zip(&traj.u).map(|(t, u)| [num(*t), num(*u)]),
    )?;
    ctx.say(format!(
        "{}: κ = {kappa:.6}  U({}) = {:.6}",
        kin.name(),
        cfg.validate_t,
        traj.last()
    ));
    Ok(())
}

pub fn prepare_out(out: &Path) -> Result<()> {
    ensure_dir(out)
}

/// Wall-clock wrapper used by `main` for the closing summary.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, std::time::Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}
