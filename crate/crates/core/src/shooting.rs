//! Shooting on the delayed degenerate wave equation
//!
//! ```text
//! c φ' = (φ^m)'' - d(φ) + b(φ(ξ - c r)),   φ ≡ 0 for ξ ≤ 0,
//! ```
//!
//! written as the first-order system in `(φ, ψ)` with `ψ = (φ^m)'`:
//!
//! ```text
//! φ' = ψ / (m φ^(m-1)),    ψ' = c φ' + d(φ) - b(φ(ξ - c r)).
//! ```
//!
//! Integration starts just right of the degenerate edge from the leading-order
//! profile `φ ≈ ((m-1) c ξ / m)^(1/(m-1))` and proceeds by the method of steps:
//! every step stays inside one delay segment `[j c r, (j+1) c r]`, so the
//! delayed argument always falls on the already computed history. A trajectory
//! that reaches κ while still rising is supercritical (`c > c*`); one whose
//! flux `ψ` vanishes below κ is subcritical (`c < c*`).

use alloc::format;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::kinetics::Kinetics;
use crate::ode::{self, hermite, limit_slopes, Tolerance};

pub const DEFAULT_PHI0_REL: f64 = 1e-6;
pub const DEFAULT_RTOL: f64 = 1e-9;
pub const DEFAULT_XI_MAX: f64 = 50.0;
pub const DEFAULT_SPEED_TOL: f64 = 1e-4;
/// `ξ_max` may be doubled this many times to resolve an undecided speed.
pub const MAX_HORIZON_DOUBLINGS: u32 = 6;
const MAX_BRACKET_SCALINGS: u32 = 20;
const MAX_BISECTIONS: u32 = 200;
/// A descending run counts as having returned to zero below this fraction of κ.
const DESCENT_FLOOR_REL: f64 = 1e-3;

/// Outcome of a shooting run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// The profile rose through κ: the speed is above critical.
    Supercritical,
    /// The flux vanished below κ: the speed is below critical.
    Subcritical,
    /// Neither happened before the horizon.
    Undecided,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Supercritical => "supercritical",
            Classification::Subcritical => "subcritical",
            Classification::Undecided => "undecided",
        }
    }
}

/// Starting point on the leading-order edge profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub xi0: f64,
    pub phi0: f64,
    pub psi0: f64,
}

fn check_speed_exponent(c: f64, m: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(domain(format!("wave speed must be positive, got {c}")));
    }
    if !(m > 1.0) || !m.is_finite() {
        return Err(domain(format!("diffusion exponent must exceed 1, got {m}")));
    }
    Ok(())
}

/// Leading-order edge profile `((m-1) c ξ / m)_+^(1/(m-1))`.
pub fn asymptotic_profile(c: f64, m: f64, xi: f64) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    libm::pow((m - 1.0) * c * xi / m, 1.0 / (m - 1.0))
}

/// Position and flux at which the leading-order profile takes the value `phi0`.
pub fn asymptotic_seed(c: f64, m: f64, phi0: f64) -> Result<Seed> {
    check_speed_exponent(c, m)?;
    if !(phi0 > 0.0) || !phi0.is_finite() {
        return Err(domain(format!("seed density must be positive, got {phi0}")));
    }
    let xi0 = m / ((m - 1.0) * c) * libm::pow(phi0, m - 1.0);
    Ok(Seed {
        xi0,
        phi0,
        psi0: c * phi0,
    })
}

/// Integrator settings for the shooting runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Seed density relative to κ.
    pub phi0_rel: f64,
    pub rtol: f64,
    /// Sample spacing of returned profiles; `None` picks `1e-3 c r`
    /// (or `1e-3` without delay).
    pub output_spacing: Option<f64>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            phi0_rel: DEFAULT_PHI0_REL,
            rtol: DEFAULT_RTOL,
            output_spacing: None,
        }
    }
}

/// The wave equation for fixed `(m, r)` and kinetics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveEquation {
    pub m: f64,
    pub r: f64,
    pub kinetics: Kinetics,
    pub kappa: f64,
    pub options: ShootingOptions,
}

/// A sampled local solution of the wave equation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub c: f64,
    pub m: f64,
    pub r: f64,
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub classification: Classification,
    /// Where `ψ` first reached zero, for subcritical runs.
    pub xi_peak: Option<f64>,
}

impl WaveProfile {
    /// `φ(ξ)` by linear interpolation on the samples, `0` left of the edge.
    pub fn phi_at(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        if xi < self.xi[0] {
            return asymptotic_profile(self.c, self.m, xi);
        }
        ode::interp_linear(&self.xi, &self.phi, xi)
    }

    /// Number of leading samples on which `ψ > 0`.
    pub fn rising_len(&self) -> usize {
        self.psi.iter().position(|&p| p <= 0.0).unwrap_or(self.psi.len())
    }
}

/// Outcome of continuing a subcritical run past its peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Descent {
    pub classification: Classification,
    pub xi_peak: Option<f64>,
    /// `ψ` became positive again after the peak.
    pub rebounded: bool,
    /// `φ` dropped back to `1e-3 κ`.
    pub reached_zero: bool,
    pub xi_end: f64,
}

/// One bisection iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionStep {
    pub iter: usize,
    pub c_lo: f64,
    pub c_hi: f64,
    pub mid: f64,
    pub mid_class: Classification,
}

/// Bracket around the critical speed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedBracket {
    /// Largest speed found subcritical.
    pub c_lo: f64,
    /// Smallest speed found supercritical.
    pub c_hi: f64,
    pub width: f64,
    /// `false` when an undecided midpoint stopped the bisection early.
    pub resolved: bool,
    /// Horizon under which both endpoints were classified.
    pub xi_max: f64,
    pub steps: Vec<BisectionStep>,
}

impl SpeedBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.c_lo + self.c_hi)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Classify,
    Descend,
}

/// Accepted integrator nodes; doubles as the delay history.
#[derive(Default)]
struct Nodes {
    xi: Vec<f64>,
    phi: Vec<f64>,
    psi: Vec<f64>,
    dphi: Vec<f64>,
    dpsi: Vec<f64>,
}

impl Nodes {
    fn push(&mut self, xi: f64, y: &[f64; 2], dy: &[f64; 2]) {
        self.xi.push(xi);
        self.phi.push(y[0]);
        self.psi.push(y[1]);
        self.dphi.push(dy[0]);
        self.dpsi.push(dy[1]);
    }

    /// `φ(η)` for `η` no later than the last node.
    fn lookup(&self, c: f64, m: f64, eta: f64) -> f64 {
        if eta <= 0.0 {
            return 0.0;
        }
        if eta < self.xi[0] {
            return asymptotic_profile(c, m, eta);
        }
        let n = self.xi.len();
        if eta >= self.xi[n - 1] {
            return self.phi[n - 1];
        }
        let i = self.xi.partition_point(|&v| v <= eta) - 1;
        let (x0, x1, y0, y1) = (self.xi[i], self.xi[i + 1], self.phi[i], self.phi[i + 1]);
        let (d0, d1) = limit_slopes(x0, x1, y0, y1, self.dphi[i], self.dphi[i + 1]);
        hermite(x0, x1, y0, y1, d0, d1, eta)
    }
}

struct Shot {
    nodes: Nodes,
    classification: Classification,
    xi_peak: Option<f64>,
    rebounded: bool,
    reached_zero: bool,
}

impl WaveEquation {
    pub fn new(m: f64, r: f64, kinetics: Kinetics, kappa: f64) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() {
            return Err(domain(format!("diffusion exponent must exceed 1, got {m}")));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(domain(format!("delay must be non-negative, got {r}")));
        }
        if !(kappa > 0.0) {
            return Err(domain("carrying capacity must be positive"));
        }
        Ok(Self {
            m,
            r,
            kinetics,
            kappa,
            options: ShootingOptions::default(),
        })
    }

    pub fn with_options(mut self, options: ShootingOptions) -> Self {
        self.options = options;
        self
    }

    pub fn seed(&self, c: f64) -> Result<Seed> {
        asymptotic_seed(c, self.m, self.options.phi0_rel * self.kappa)
    }

    fn rhs(&self, c: f64, nodes: &Nodes, xi: f64, y: &[f64; 2]) -> [f64; 2] {
        let (phi, psi) = (y[0], y[1]);
        let diffusivity = if self.m == 2.0 {
            2.0 * phi
        } else {
            self.m * libm::pow(phi, self.m - 1.0)
        };
        let dphi = psi / diffusivity;
        let delayed = if self.r > 0.0 {
            nodes.lookup(c, self.m, xi - c * self.r)
        } else {
            phi
        };
        let dpsi = c * dphi + self.kinetics.death(phi) - self.kinetics.birth(delayed);
        [dphi, dpsi]
    }

    fn shoot(&self, c: f64, xi_max: f64, mode: Mode) -> Result<Shot> {
        if !(xi_max > 0.0) {
            return Err(domain("xi_max must be positive"));
        }
        let seed = self.seed(c)?;
        let tol = Tolerance {
            rtol: self.options.rtol,
            atol: self.options.rtol * seed.phi0 * 1e-3,
        };
        let cr = c * self.r;

        let mut nodes = Nodes::default();
        let mut xi = seed.xi0;
        let mut y = [seed.phi0, seed.psi0];
        let mut dy = self.rhs(c, &nodes_with_seed(&seed), xi, &y);
        nodes.push(xi, &y, &dy);

        // Index of the next delay breakpoint j·cr beyond the seed.
        let mut next_break = if cr > 0.0 {
            libm::floor(xi / cr) + 1.0
        } else {
            f64::INFINITY
        };
        let mut h = 0.1 * seed.xi0;
        let mut xi_peak = None;
        let mut peaked = false;
        let mut rebounded = false;

        loop {
            if xi >= xi_max {
                return Ok(Shot {
                    nodes,
                    classification: if peaked {
                        Classification::Subcritical
                    } else {
                        Classification::Undecided
                    },
                    xi_peak,
                    rebounded,
                    reached_zero: false,
                });
            }
            let break_xi = if cr > 0.0 { next_break * cr } else { f64::INFINITY };
            let mut target = (xi + h).min(xi_max);
            let hits_break = target >= break_xi;
            if hits_break {
                target = break_xi;
            }
            let step = target - xi;
            if step <= 1e-13 * xi.max(1.0) && !hits_break {
                return Err(Error::Numerical(format!(
                    "step size underflow at c = {c}, xi = {xi}, phi = {}, psi = {}",
                    y[0], y[1]
                )));
            }
            let trial = {
                let mut f = |x: f64, s: &[f64; 2]| self.rhs(c, &nodes, x, s);
                ode::trial_step(&mut f, xi, &y, &dy, step, tol)
            };
            if trial.err > 1.0 {
                h = step * ode::step_scale(trial.err);
                if h <= 1e-13 * xi.max(1.0) {
                    return Err(Error::Numerical(format!(
                        "step size underflow at c = {c}, xi = {xi}, phi = {}, psi = {}",
                        y[0], y[1]
                    )));
                }
                continue;
            }
            let (xi_a, psi_a, phi_a) = (xi, y[1], y[0]);
            xi = target;
            y = trial.y;
            dy = trial.dy;
            nodes.push(xi, &y, &dy);
            if hits_break {
                next_break += 1.0;
            }
            h = step * ode::step_scale(trial.err);

            let (phi_b, psi_b) = (y[0], y[1]);
            if phi_b >= self.kappa && !peaked {
                // If ψ also vanished in this step, the earlier crossing wins.
                let crossed_kappa_first = psi_b > 0.0 || {
                    let at_kappa = (self.kappa - phi_a) / (phi_b - phi_a);
                    let at_zero = psi_a / (psi_a - psi_b);
                    at_kappa < at_zero
                };
                if crossed_kappa_first {
                    return Ok(Shot {
                        nodes,
                        classification: Classification::Supercritical,
                        xi_peak: None,
                        rebounded: false,
                        reached_zero: false,
                    });
                }
            }
            if !peaked && psi_b <= 0.0 {
                peaked = true;
                xi_peak = Some(xi_a + (xi - xi_a) * psi_a / (psi_a - psi_b));
                if mode == Mode::Classify {
                    return Ok(Shot {
                        nodes,
                        classification: Classification::Subcritical,
                        xi_peak,
                        rebounded: false,
                        reached_zero: false,
                    });
                }
            } else if peaked {
                if psi_b > 0.0 {
                    rebounded = true;
                }
                if phi_b <= DESCENT_FLOOR_REL * self.kappa {
                    return Ok(Shot {
                        nodes,
                        classification: Classification::Subcritical,
                        xi_peak,
                        rebounded,
                        reached_zero: true,
                    });
                }
            }
        }
    }

    /// Classifies the speed `c` under the horizon `xi_max` without sampling.
    pub fn classify_speed(&self, c: f64, xi_max: f64) -> Result<Classification> {
        Ok(self.shoot(c, xi_max, Mode::Classify)?.classification)
    }

    /// Integrates from the edge seed until the profile reaches κ, its flux
    /// vanishes, or `xi_max` is passed, and resamples it densely.
    pub fn integrate_profile(&self, c: f64, xi_max: f64) -> Result<WaveProfile> {
        let shot = self.shoot(c, xi_max, Mode::Classify)?;
        let spacing = self
            .options
            .output_spacing
            .unwrap_or(if self.r > 0.0 { 1e-3 * c * self.r } else { 1e-3 });
        if !(spacing > 0.0) {
            return Err(domain("output spacing must be positive"));
        }
        let n = &shot.nodes;
        let last = n.xi.len() - 1;
        let xi_start = n.xi[0];
        let xi_end = n.xi[last];
        let count = libm::ceil((xi_end - xi_start) / spacing) as usize;
        let mut xi = Vec::with_capacity(count + 1);
        let mut phi = Vec::with_capacity(count + 1);
        let mut psi = Vec::with_capacity(count + 1);
        let mut seg = 0;
        for j in 0..count {
            let x = xi_start + j as f64 * spacing;
            if x >= xi_end {
                break;
            }
            while n.xi[seg + 1] <= x {
                seg += 1;
            }
            let (x0, x1) = (n.xi[seg], n.xi[seg + 1]);
            let (d0, d1) = limit_slopes(x0, x1, n.phi[seg], n.phi[seg + 1], n.dphi[seg], n.dphi[seg + 1]);
            xi.push(x);
            phi.push(hermite(x0, x1, n.phi[seg], n.phi[seg + 1], d0, d1, x));
            psi.push(hermite(
                x0,
                x1,
                n.psi[seg],
                n.psi[seg + 1],
                n.dpsi[seg],
                n.dpsi[seg + 1],
                x,
            ));
        }
        xi.push(xi_end);
        phi.push(n.phi[last]);
        psi.push(n.psi[last]);
        Ok(WaveProfile {
            c,
            m: self.m,
            r: self.r,
            xi,
            phi,
            psi,
            classification: shot.classification,
            xi_peak: shot.xi_peak,
        })
    }

    /// Continues a run past the peak until `φ` drops back near zero,
    /// reporting whether the flux ever turned positive again.
    pub fn descend(&self, c: f64, xi_max: f64) -> Result<Descent> {
        let shot = self.shoot(c, xi_max, Mode::Descend)?;
        Ok(Descent {
            classification: shot.classification,
            xi_peak: shot.xi_peak,
            rebounded: shot.rebounded,
            reached_zero: shot.reached_zero,
            xi_end: *shot.nodes.xi.last().expect("seed node"),
        })
    }

    /// Classifies `c`, doubling the horizon while the outcome is undecided.
    fn classify_resolving(&self, c: f64, horizon: &mut f64, cap: f64) -> Result<Classification> {
        loop {
            let class = self.classify_speed(c, *horizon)?;
            if class != Classification::Undecided || *horizon >= cap {
                return Ok(class);
            }
            *horizon *= 2.0;
        }
    }

    /// Brackets the critical speed by geometric scanning from `c = 1` and
    /// bisects it down to `tol`.
    pub fn critical_speed(&self, tol: f64, xi_max: f64) -> Result<SpeedBracket> {
        if !(tol > 0.0) || !(xi_max > 0.0) {
            return Err(domain("tol and xi_max must be positive"));
        }
        let cap = xi_max * libm::pow(2.0, MAX_HORIZON_DOUBLINGS as f64);
        let mut horizon = xi_max;

        let start = self.classify_resolving(1.0, &mut horizon, cap)?;
        let (mut c_lo, mut c_hi) = match start {
            Classification::Supercritical => (None, Some(1.0)),
            Classification::Subcritical => (Some(1.0), None),
            Classification::Undecided => (None, None),
        };
        let mut c = 1.0;
        for _ in 0..MAX_BRACKET_SCALINGS {
            if c_lo.is_some() {
                break;
            }
            c *= 0.5;
            match self.classify_resolving(c, &mut horizon, cap)? {
                Classification::Subcritical => c_lo = Some(c),
                Classification::Supercritical => c_hi = Some(c),
                Classification::Undecided => {}
            }
        }
        c = 1.0;
        for _ in 0..MAX_BRACKET_SCALINGS {
            if c_hi.is_some() {
                break;
            }
            c *= 2.0;
            match self.classify_resolving(c, &mut horizon, cap)? {
                Classification::Supercritical => c_hi = Some(c),
                Classification::Subcritical => c_lo = Some(c),
                Classification::Undecided => {}
            }
        }
        let (mut c_lo, mut c_hi) = match (c_lo, c_hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(Error::Numerical("no speed bracket found by geometric scan".into())),
        };

        let mut steps = Vec::new();
        let mut resolved = true;
        for iter in 1..=MAX_BISECTIONS as usize {
            if c_hi - c_lo <= tol {
                break;
            }
            let mid = 0.5 * (c_lo + c_hi);
            let class = self.classify_resolving(mid, &mut horizon, cap)?;
            match class {
                Classification::Supercritical => c_hi = mid,
                Classification::Subcritical => c_lo = mid,
                Classification::Undecided => resolved = false,
            }
            steps.push(BisectionStep {
                iter,
                c_lo,
                c_hi,
                mid,
                mid_class: class,
            });
            if !resolved {
                break;
            }
        }
        Ok(SpeedBracket {
            c_lo,
            c_hi,
            width: c_hi - c_lo,
            resolved,
            xi_max: horizon,
            steps,
        })
    }
}

/// History holding only the seed; used for the initial slope evaluation.
fn nodes_with_seed(seed: &Seed) -> Nodes {
    let mut n = Nodes::default();
    n.push(seed.xi0, &[seed.phi0, seed.psi0], &[0.0, 0.0]);
    n
}

/// Maps the terminal state of a profile to its classification.
pub fn classify(profile: &WaveProfile, kappa: f64) -> Classification {
    match (profile.phi.last(), profile.psi.last()) {
        (Some(&phi), Some(&psi)) if phi >= kappa && psi > 0.0 => Classification::Supercritical,
        (Some(&phi), Some(&psi)) if psi <= 0.0 && phi < kappa => Classification::Subcritical,
        _ => Classification::Undecided,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fisher(r: f64) -> WaveEquation {
        WaveEquation::new(2.0, r, Kinetics::fisher_kpp(), 1.0).unwrap()
    }

    #[test]
    fn seed_examples() {
        assert!((asymptotic_profile(1.0, 2.0, 0.01) - 0.005).abs() < 1e-15);
        let s = asymptotic_seed(1.0, 2.0, 0.005).unwrap();
        assert!((s.xi0 - 0.01).abs() < 1e-15 && (s.psi0 - 0.005).abs() < 1e-15);

        let s = asymptotic_seed(2.0, 2.0, 0.01).unwrap();
        assert!((s.xi0 - 0.01).abs() < 1e-15 && (s.psi0 - 0.02).abs() < 1e-15);

        let s = asymptotic_seed(1.0, 3.0, 0.01).unwrap();
        assert!((s.xi0 - 1.5e-4).abs() < 1e-17 && (s.psi0 - 0.01).abs() < 1e-15);
    }

    #[test]
    fn seed_back_substitution_residual_is_small() {
        // Leading-order profile in c φ' = (φ^m)'' - d(φ) + b(0) near the edge:
        // the two leading terms cancel, leaving the O(φ) reaction.
        let (c, m) = (1.0, 3.0);
        let k = Kinetics::fisher_kpp();
        let s = asymptotic_seed(c, m, 0.01).unwrap();
        let h = 1e-3 * s.xi0;
        let p = |x: f64| asymptotic_profile(c, m, x);
        let pm = |x: f64| p(x).powf(m);
        let dphi = (p(s.xi0 + h) - p(s.xi0 - h)) / (2.0 * h);
        let lap = (pm(s.xi0 + h) - 2.0 * pm(s.xi0) + pm(s.xi0 - h)) / (h * h);
        let residual = c * dphi - lap + k.death(s.phi0);
        assert!(
            residual.abs() < 1e-3 * (c * dphi).abs(),
            "residual {residual} vs {}",
            c * dphi
        );
        assert!((s.phi0 - p(s.xi0)).abs() < 1e-12);
    }

    #[test]
    fn seed_rejects_bad_arguments() {
        assert!(asymptotic_seed(0.0, 2.0, 0.01).is_err());
        assert!(asymptotic_seed(1.0, 1.0, 0.01).is_err());
        assert!(asymptotic_seed(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn undelayed_classification() {
        let eq = fisher(0.0);
        assert_eq!(eq.classify_speed(2.0, 50.0).unwrap(), Classification::Supercritical);
        assert_eq!(eq.classify_speed(0.5, 50.0).unwrap(), Classification::Subcritical);
    }

    #[test]
    fn critical_undelayed_profile_follows_exact_wave() {
        let eq = fisher(0.0);
        let p = eq.integrate_profile(1.0, 30.0).unwrap();
        assert_ne!(p.classification, Classification::Subcritical);
        for (&x, &v) in p.xi.iter().zip(&p.phi).step_by(97) {
            if x > 8.0 {
                break;
            }
            let exact = 1.0 - (-x / 2.0).exp();
            assert!((v - exact).abs() < 1e-6, "xi = {x}: {v} vs {exact}");
        }
        assert!((p.phi.last().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn classify_examples() {
        let mk = |phi: f64, psi: f64| WaveProfile {
            c: 1.0,
            m: 2.0,
            r: 0.0,
            xi: alloc::vec![0.0, 1.0],
            phi: alloc::vec![0.0, phi],
            psi: alloc::vec![0.0, psi],
            classification: Classification::Undecided,
            xi_peak: None,
        };
        assert_eq!(classify(&mk(1.0 + 1e-6, 0.1), 1.0), Classification::Supercritical);
        assert_eq!(classify(&mk(0.7, 0.0), 1.0), Classification::Subcritical);
        assert_eq!(classify(&mk(0.99, 0.01), 1.0), Classification::Undecided);
    }

    #[test]
    fn profile_invariants() {
        for (c, r) in [(0.8, 0.1), (1.2, 0.1), (0.95, 0.0)] {
            let eq = fisher(r);
            let p = eq.integrate_profile(c, 50.0).unwrap();
            let seed = eq.seed(c).unwrap();
            assert!((p.phi[0] - seed.phi0).abs() <= 0.01 * seed.phi0);
            let rising = p.rising_len();
            for w in p.phi[..rising].windows(2) {
                assert!(w[1] > w[0]);
            }
            assert_eq!(classify(&p, 1.0), p.classification, "c = {c}");
            if r > 0.0 {
                let spacing = p.xi[1] - p.xi[0];
                assert!(spacing <= 1e-3 * c * r * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn subcritical_descent_never_rebounds() {
        for (c, r) in [(0.6, 0.0), (0.8, 0.1), (0.7, 0.3)] {
            let d = fisher(r).descend(c, 200.0).unwrap();
            assert_eq!(d.classification, Classification::Subcritical);
            assert!(d.reached_zero, "c = {c}, r = {r}");
            assert!(!d.rebounded, "c = {c}, r = {r}");
        }
    }

    #[test]
    fn bracket_endpoints_keep_their_classes() {
        let eq = fisher(0.2);
        let b = eq.critical_speed(1e-3, DEFAULT_XI_MAX).unwrap();
        assert!(b.resolved && b.width <= 1e-3);
        assert_eq!(
            eq.classify_speed(b.c_lo, b.xi_max).unwrap(),
            Classification::Subcritical
        );
        assert_eq!(
            eq.classify_speed(b.c_hi, b.xi_max).unwrap(),
            Classification::Supercritical
        );
        for s in &b.steps {
            assert!(s.c_lo < s.c_hi);
            assert_eq!(
                eq.classify_speed(s.c_lo, b.xi_max).unwrap(),
                Classification::Subcritical
            );
            assert_eq!(
                eq.classify_speed(s.c_hi, b.xi_max).unwrap(),
                Classification::Supercritical
            );
        }
    }

    #[test]
    fn porous_exponent_three_has_finite_critical_speed() {
        let eq = WaveEquation::new(3.0, 0.1, Kinetics::fisher_kpp(), 1.0).unwrap();
        let b = eq.critical_speed(1e-3, DEFAULT_XI_MAX).unwrap();
        assert!(b.resolved);
        assert!(b.midpoint() > 0.0 && b.midpoint().is_finite());
    }
}
