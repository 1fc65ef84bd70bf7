//! Numerical laboratory for frequency-modulated quantum harmonic oscillators.
//!
//! The oscillator `H = p²/2m + m ω²(t) x²/2` is handled through its
//! Ermakov-Lewis-Riesenfeld invariant. Everything observable reduces to the
//! classical mode `g(t)` solving `g̈ + ω²(t) g = 0`:
//!
//! - [`profiles`] defines `ω²(t)` (constant, tanh step, tabulated data).
//! - [`dynamics`] integrates the mode and derives `g₋`, the squeezing factor
//!   `𝒮`, the nonadiabaticity `𝒜̸ = d𝒮/dt` and the invariant phase.
//! - [`analytic`] is the exact ₂F₁ solution for the tanh profile together
//!   with its Bogoliubov coefficients and closed-form limits.
//! - [`thermo`] maps the invariant thermal state onto energy, temperature,
//!   force and entropy, and reconstructs `ω(t)` from an `Ω(t)` schedule.
//!
//! Units: `ħ = k_B = 1`. Frequencies are inverse time, temperatures and
//! energies share the frequency unit.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
mod error;
pub mod export;
pub mod ode;
pub mod profiles;
pub mod quadrature;
pub mod special;
pub mod thermo;

pub use error::{Error, Result};
