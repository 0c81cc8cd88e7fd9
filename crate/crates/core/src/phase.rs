//! Phase-plane view of a rising wave profile.
//!
//! On the strictly increasing part of a profile the flux `ψ = (φ^m)'` can be
//! read as a function `ψ̃(φ)` of the density. Since `dξ = m φ^(m-1) dφ / ψ̃(φ)`,
//! the delayed value `φ(ξ - c r)` is recovered from the phase curve alone: it
//! is the density `θ` with `∫_θ^φ m s^(m-1) / ψ̃(s) ds = c r`, or `0` when the
//! whole integral from the edge is not longer than `c r`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::ode::interp_linear;
use crate::shooting::WaveProfile;

/// `ψ̃(φ)` tabulated on the rising segment of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCurve {
    pub m: f64,
    /// Strictly increasing densities.
    pub phi: Vec<f64>,
    /// Flux at each density.
    pub psi_tilde: Vec<f64>,
    /// `∫_0^φ m s^(m-1) / ψ̃(s) ds` at each tabulated density.
    cumulative: Vec<f64>,
}

impl PhaseCurve {
    /// Reparameterizes the samples with `ψ > 0` by density.
    pub fn from_profile(profile: &WaveProfile) -> Result<Self> {
        let n = profile.rising_len();
        if n < 2 {
            return Err(domain("profile has fewer than two rising samples"));
        }
        let phi = profile.phi[..n].to_vec();
        if let Some(i) = phi.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(domain(format!(
                "profile is not strictly increasing at xi = {}",
                profile.xi[i + 1]
            )));
        }
        Self::from_samples(profile.m, phi, profile.psi[..n].to_vec())
    }

    /// Builds a curve from raw `(φ, ψ̃)` tables.
    pub fn from_samples(m: f64, phi: Vec<f64>, psi_tilde: Vec<f64>) -> Result<Self> {
        if phi.len() != psi_tilde.len() || phi.len() < 2 {
            return Err(domain("phase curve needs at least two matching samples"));
        }
        if phi[0] <= 0.0 || phi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("phase curve densities must be positive and strictly increasing"));
        }
        if psi_tilde.iter().any(|&p| !(p > 0.0)) {
            return Err(domain("phase curve flux must be positive"));
        }
        let g = |s: f64, psi: f64| m * libm::pow(s, m - 1.0) / psi;
        // Below the first sample ψ̃(s) ≈ (ψ̃_0 / φ_0) s.
        let mut cumulative = Vec::with_capacity(phi.len());
        cumulative.push(m * libm::pow(phi[0], m) / ((m - 1.0) * psi_tilde[0]));
        for i in 1..phi.len() {
            let step = 0.5 * (phi[i] - phi[i - 1]) * (g(phi[i - 1], psi_tilde[i - 1]) + g(phi[i], psi_tilde[i]));
            cumulative.push(cumulative[i - 1] + step);
        }
        Ok(Self {
            m,
            phi,
            psi_tilde,
            cumulative,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.phi[0], self.phi[self.phi.len() - 1])
    }

    pub fn contains(&self, phi: f64) -> bool {
        let (lo, hi) = self.domain();
        phi >= lo && phi <= hi
    }

    /// `ψ̃(φ)` by linear interpolation.
    pub fn psi_at(&self, phi: f64) -> f64 {
        interp_linear(&self.phi, &self.psi_tilde, phi)
    }

    fn integrand(&self, s: f64) -> f64 {
        self.m * libm::pow(s, self.m - 1.0) / self.psi_at(s)
    }

    /// `∫_0^φ m s^(m-1) / ψ̃(s) ds`, which equals the position `ξ(φ)`.
    pub fn travel(&self, phi: f64) -> Result<f64> {
        if !self.contains(phi) {
            return Err(self.outside(phi));
        }
        let i = self.interval(phi);
        Ok(self.partial(i, phi))
    }

    fn interval(&self, phi: f64) -> usize {
        let last = self.phi.len() - 1;
        (self.phi.partition_point(|&v| v <= phi).max(1) - 1).min(last - 1)
    }

    fn partial(&self, i: usize, phi: f64) -> f64 {
        let g0 = self.m * libm::pow(self.phi[i], self.m - 1.0) / self.psi_tilde[i];
        self.cumulative[i] + 0.5 * (phi - self.phi[i]) * (g0 + self.integrand(phi))
    }

    fn outside(&self, phi: f64) -> crate::error::Error {
        let (lo, hi) = self.domain();
        domain(format!(
            "density {phi} lies outside the phase curve domain [{lo}, {hi}]"
        ))
    }

    /// The delayed density `φ(ξ - c r)` expressed through the phase curve.
    pub fn delayed_phase_map(&self, c: f64, r: f64, phi: f64) -> Result<f64> {
        if !self.contains(phi) {
            return Err(self.outside(phi));
        }
        let lag = c * r;
        if lag == 0.0 {
            return Ok(phi);
        }
        let total = self.travel(phi)?;
        if total <= lag {
            return Ok(0.0);
        }
        let target = total - lag;
        let m = self.m;
        if target <= self.cumulative[0] {
            // Inside the seed layer, invert the leading-order travel.
            let c_edge = self.psi_tilde[0] / self.phi[0];
            return Ok(libm::pow((m - 1.0) * c_edge * target / m, 1.0 / (m - 1.0)));
        }
        let i = self.cumulative.partition_point(|&v| v <= target) - 1;
        if i + 1 >= self.phi.len() {
            return Ok(self.phi[i]);
        }
        let (mut lo, mut hi) = (self.phi[i], self.phi[i + 1]);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.partial(i, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Free-function form of [`PhaseCurve::from_profile`].
pub fn phase_curve(profile: &WaveProfile) -> Result<PhaseCurve> {
    PhaseCurve::from_profile(profile)
}

/// Free-function form of [`PhaseCurve::delayed_phase_map`].
pub fn delayed_phase_map(curve: &PhaseCurve, c: f64, r: f64, phi: f64) -> Result<f64> {
    curve.delayed_phase_map(c, r, phi)
}
