//! Birth and death rates of the reaction term, their equilibrium, and the
//! spatially homogeneous delay equation `U' = -d(U) + b(U(t - r))`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{config, domain, Error, Result};

pub const DEFAULT_SCAN_MAX: f64 = 10.0;
pub const DEFAULT_KAPPA_TOL: f64 = 1e-12;
pub const DEFAULT_VALIDATE_SAMPLES: usize = 400;

const FD_STEP: f64 = 1e-6;
const FD_REL_TOL: f64 = 1e-5;
const KAPPA_SCAN_SAMPLES: usize = 1000;

/// Built-in reaction families.
///
/// `FisherKpp` has `b(u) = p u`, `d(u) = q u^2`; `LinearDeath` adds a linear
/// death rate, `d(u) = a u + q u^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kinetics {
    FisherKpp { p: f64, q: f64 },
    LinearDeath { p: f64, a: f64, q: f64 },
}

impl Default for Kinetics {
    fn default() -> Self {
        Kinetics::FisherKpp { p: 1.0, q: 1.0 }
    }
}

impl Kinetics {
    pub const fn fisher_kpp() -> Self {
        Kinetics::FisherKpp { p: 1.0, q: 1.0 }
    }

    /// Builds a family member from its name and `(key, value)` parameters.
    /// Missing keys take the family defaults; unknown keys are rejected.
    pub fn from_params(name: &str, params: &[(&str, f64)]) -> Result<Self> {
        let allowed: &[&str] = match name {
            "fisher-kpp" => &["p", "q"],
            "linear-death" => &["p", "a", "q"],
            other => return Err(config(format!("unknown kinetics '{other}'"))),
        };
        for (key, value) in params {
            if !allowed.contains(key) {
                return Err(config(format!("kinetics '{name}' has no parameter '{key}'")));
            }
            if !value.is_finite() {
                return Err(config(format!("kinetics parameter '{key}' is not finite")));
            }
        }
        let get = |key: &str, default: f64| {
            params
                .iter()
                .rev()
                .find(|(k, _)| *k == key)
                .map_or(default, |(_, v)| *v)
        };
        Ok(match name {
            "fisher-kpp" => Kinetics::FisherKpp {
                p: get("p", 1.0),
                q: get("q", 1.0),
            },
            _ => Kinetics::LinearDeath {
                p: get("p", 1.0),
                a: get("a", 0.0),
                q: get("q", 1.0),
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kinetics::FisherKpp { .. } => "fisher-kpp",
            Kinetics::LinearDeath { .. } => "linear-death",
        }
    }

    #[inline]
    pub fn birth(&self, s: f64) -> f64 {
        match *self {
            Kinetics::FisherKpp { p, .. } | Kinetics::LinearDeath { p, .. } => p * s,
        }
    }

    #[inline]
    pub fn death(&self, s: f64) -> f64 {
        match *self {
            Kinetics::FisherKpp { q, .. } => q * s * s,
            Kinetics::LinearDeath { a, q, .. } => a * s + q * s * s,
        }
    }

    #[inline]
    pub fn birth_deriv(&self, _s: f64) -> f64 {
        match *self {
            Kinetics::FisherKpp { p, .. } | Kinetics::LinearDeath { p, .. } => p,
        }
    }

    #[inline]
    pub fn death_deriv(&self, s: f64) -> f64 {
        match *self {
            Kinetics::FisherKpp { q, .. } => 2.0 * q * s,
            Kinetics::LinearDeath { a, q, .. } => a + 2.0 * q * s,
        }
    }

    /// `(b(s), d(s))` for a density `s >= 0`.
    pub fn evaluate(&self, s: f64) -> Result<(f64, f64)> {
        if !(s >= 0.0) {
            return Err(domain(format!("density must be non-negative, got {s}")));
        }
        Ok((self.birth(s), self.death(s)))
    }

    #[inline]
    fn net(&self, s: f64) -> f64 {
        self.birth(s) - self.death(s)
    }

    /// Locates the positive equilibrium `b(κ) = d(κ)` by scanning `(0, scan_max]`
    /// for the first sign change of `b - d` and bisecting it.
    pub fn carrying_capacity(&self, scan_max: f64, tol: f64) -> Result<CarryingCapacity> {
        if !(scan_max > 0.0) || !(tol > 0.0) {
            return Err(domain("scan_max and tol must be positive"));
        }
        let ds = scan_max / KAPPA_SCAN_SAMPLES as f64;
        let mut lo = ds;
        if !(self.net(lo) > 0.0) {
            return Err(Error::NoPositiveEquilibrium);
        }
        let mut hi = None;
        for i in 2..=KAPPA_SCAN_SAMPLES {
            let s = i as f64 * ds;
            if self.net(s) <= 0.0 {
                hi = Some(s);
                break;
            }
            lo = s;
        }
        let mut hi = hi.ok_or(Error::NoPositiveEquilibrium)?;
        let mut kappa = 0.5 * (lo + hi);
        for _ in 0..200 {
            kappa = 0.5 * (lo + hi);
            let g = self.net(kappa);
            if g == 0.0 || (hi - lo) <= f64::EPSILON * hi {
                break;
            }
            if g > 0.0 {
                lo = kappa;
            } else {
                hi = kappa;
            }
        }
        if self.net(hi) == 0.0 {
            kappa = hi;
        }
        if self.net(kappa).abs() > tol {
            return Err(Error::Numerical(format!(
                "equilibrium residual {} exceeds tolerance {tol}",
                self.net(kappa).abs()
            )));
        }
        Ok(CarryingCapacity { kappa })
    }

    /// Checks the structural hypotheses on `(b, d)` over sampled densities.
    /// Violations are returned as data; an empty list means every check passed.
    pub fn validate(&self, scan_max: f64, n_samples: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = n_samples.max(2);

        if self.birth(0.0) != 0.0 || self.death(0.0) != 0.0 {
            out.push(Violation::NonzeroAtOrigin);
        }
        let (b0, d0) = (self.birth_deriv(0.0), self.death_deriv(0.0));
        let slope_ok = b0 > d0;
        if !slope_ok {
            out.push(Violation::BirthSlopeNotDominant);
        }
        if d0 < 0.0 {
            out.push(Violation::NegativeDeathSlope);
        }

        let mut range = scan_max;
        if slope_ok {
            match self.carrying_capacity(scan_max, DEFAULT_KAPPA_TOL) {
                Ok(cap) => {
                    range = 2.0 * cap.kappa;
                    let kappa = cap.kappa;
                    if let Some(s) = (1..=n)
                        .map(|i| range * i as f64 / n as f64)
                        .filter(|s| (s - kappa).abs() > 1e-9 * kappa)
                        .find(|&s| self.net(s) * (s - kappa) >= 0.0)
                    {
                        out.push(Violation::SignStructure { at: s });
                    }
                }
                Err(_) => out.push(Violation::NoPositiveEquilibrium),
            }
        }

        let samples = || (0..=n).map(move |i| range * i as f64 / n as f64);
        let mut prev: Option<(f64, f64)> = None;
        let (mut b_bad, mut d_bad) = (None, None);
        for s in samples() {
            let cur = (self.birth(s), self.death(s));
            if let Some((pb, pd)) = prev {
                if b_bad.is_none() && cur.0 < pb {
                    b_bad = Some(s);
                }
                if d_bad.is_none() && cur.1 < pd {
                    d_bad = Some(s);
                }
            }
            prev = Some(cur);
        }
        if let Some(at) = b_bad {
            out.push(Violation::NotMonotone { rate: Rate::Birth, at });
        }
        if let Some(at) = d_bad {
            out.push(Violation::NotMonotone { rate: Rate::Death, at });
        }

        for s in samples() {
            let fd_b = (self.birth(s + FD_STEP) - self.birth(s - FD_STEP)) / (2.0 * FD_STEP);
            let fd_d = (self.death(s + FD_STEP) - self.death(s - FD_STEP)) / (2.0 * FD_STEP);
            let agrees = |fd: f64, exact: f64| (fd - exact).abs() <= FD_REL_TOL * exact.abs().max(1.0);
            if !agrees(fd_b, self.birth_deriv(s)) {
                out.push(Violation::DerivativeMismatch {
                    rate: Rate::Birth,
                    at: s,
                });
                break;
            }
            if !agrees(fd_d, self.death_deriv(s)) {
                out.push(Violation::DerivativeMismatch {
                    rate: Rate::Death,
                    at: s,
                });
                break;
            }
        }
        out
    }

    /// Integrates `U'(t) = -d(U) + b(U(t - r))` with constant history `u0` on
    /// `[-r, 0]`. Heun's method keeps both delayed arguments on grid levels, so
    /// `r` must be an integer multiple of `dt`.
    pub fn homogeneous_dynamics(&self, r: f64, u0: f64, t_end: f64, dt: f64) -> Result<Trajectory> {
        if !(u0 >= 0.0) {
            return Err(domain("initial value must be non-negative"));
        }
        if !(dt > 0.0) || !(t_end >= 0.0) || !(r >= 0.0) {
            return Err(config("dt must be positive, r and T non-negative"));
        }
        let lag = delay_steps(r, dt)?;
        let n_steps = steps_to_reach(t_end, dt);
        let rhs = |u: f64, delayed: f64| -self.death(u) + self.birth(delayed);

        let mut u = Vec::with_capacity(n_steps + 1);
        u.push(u0);
        let level = |u: &[f64], idx: isize| if idx < 0 { u0 } else { u[idx as usize] };
        for n in 0..n_steps {
            let cur = u[n];
            let k1 = rhs(cur, level(&u, n as isize - lag as isize));
            let pred = cur + dt * k1;
            let delayed_next = if lag == 0 {
                pred
            } else {
                level(&u, n as isize + 1 - lag as isize)
            };
            let k2 = rhs(pred, delayed_next);
            u.push(cur + 0.5 * dt * (k1 + k2));
        }
        let t = (0..=n_steps).map(|n| n as f64 * dt).collect();
        Ok(Trajectory { t, u })
    }
}

/// Number of whole steps of size `dt` making up the delay `r`.
pub(crate) fn delay_steps(r: f64, dt: f64) -> Result<usize> {
    let lag = libm::round(r / dt);
    if (lag * dt - r).abs() > 1e-9 * r.max(dt) {
        return Err(config(format!("delay {r} is not an integer multiple of dt = {dt}")));
    }
    Ok(lag as usize)
}

pub(crate) fn steps_to_reach(t_end: f64, dt: f64) -> usize {
    libm::ceil(t_end / dt - 1e-9) as usize
}

/// The positive equilibrium κ of the kinetics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarryingCapacity {
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    Birth,
    Death,
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rate::Birth => "b",
            Rate::Death => "d",
        })
    }
}

/// A failed structural check on the kinetics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonzeroAtOrigin,
    BirthSlopeNotDominant,
    NegativeDeathSlope,
    NoPositiveEquilibrium,
    SignStructure { at: f64 },
    NotMonotone { rate: Rate, at: f64 },
    DerivativeMismatch { rate: Rate, at: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonzeroAtOrigin => f.write_str("b(0) or d(0) is nonzero"),
            Violation::BirthSlopeNotDominant => f.write_str("b'(0) ≤ d'(0)"),
            Violation::NegativeDeathSlope => f.write_str("d'(0) < 0"),
            Violation::NoPositiveEquilibrium => f.write_str("no positive equilibrium"),
            Violation::SignStructure { at } => write!(f, "(b-d)(s)(s-κ) ≥ 0 at s = {at}"),
            Violation::NotMonotone { rate, at } => write!(f, "{rate} decreases near s = {at}"),
            Violation::DerivativeMismatch { rate, at } => {
                write!(f, "{rate}' disagrees with central differences at s = {at}")
            }
        }
    }
}

/// Time series `U(t)` of the homogeneous delay equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> f64 {
        *self.u.last().expect("trajectory holds the initial value")
    }
}
