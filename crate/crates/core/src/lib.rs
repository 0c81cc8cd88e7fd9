//! Numerical core for the delayed degenerate diffusion equation
//!
//! ```text
//! u_t = (u^m)_xx - d(u) + b(u(t - r, x))
//! ```
//!
//! in one space dimension. Two independent routes to the front speed live here:
//!
//! * [`scheme`] advances the PDE for `m = 2` with an explicit scheme that tracks
//!   the sharp edge of the support inside a grid cell, using the local profile
//!   `u ≈ c1 (x - x̂)_+ + c2 (x - x̂)_+^2`;
//! * [`shooting`] integrates the traveling-wave equation from the degenerate
//!   edge and bisects on the super/subcritical dichotomy for `c*(m, r)`.
//!
//! [`phase`] holds the phase-plane transform of a wave profile and
//! [`analysis`] the post-processing that ties both routes together.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod kinetics;
mod ode;
pub mod phase;
pub mod scheme;
pub mod shooting;

pub use error::{Error, Result};
pub use kinetics::{CarryingCapacity, Kinetics, Violation};
pub use phase::PhaseCurve;
pub use scheme::{GridConfig, InitialData, Problem, SchemeKind, SnapshotSeries};
pub use shooting::{Classification, SpeedBracket, WaveEquation, WaveProfile};
