//! Exact solution for the tanh profile and its closed-form limits.
//!
//! With `ω_I = ω₋` the positive-frequency mode is
//!
//! ```text
//! g(t) = (2mω₋)^{-1/2} e^{-i(ω₊+ω₋)t/2} (cosh t/d)^{-i(ω₊-ω₋)d/2} ₂F₁(α₋, α₊; 1 - iω₋d; y)
//! ```
//!
//! with `y = (1 + tanh t/d)/2`, `α± = (1 ± 2x)/2 + i(ω₊-ω₋)d/2` and
//! `x = √(1 + (ε₊-ε₋)²d²)/2`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::profiles::{logistic, TanhParams};
use crate::special::{hyp2f1_split, log_gamma_complex, rgamma_complex};
use crate::{Error, Result};

/// Relative tolerance of the `|α|² − |β|²` post-check.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricParams {
    pub alpha_minus: Complex64,
    pub alpha_plus: Complex64,
    pub c: Complex64,
    pub x: f64,
}

impl HypergeometricParams {
    pub fn new(p: &TanhParams) -> Self {
        let d = p.d();
        let (wm, wp) = (p.omega_minus(), p.omega_plus());
        let x = 0.5 * (1.0 + ((p.eps_plus() - p.eps_minus()) * d).powi(2)).sqrt();
        let shift = Complex64::new(0.0, 0.5 * (wp - wm) * d);
        Self {
            alpha_minus: Complex64::from(0.5 - x) + shift,
            alpha_plus: Complex64::from(0.5 + x) + shift,
            c: Complex64::new(1.0, -wm * d),
            x,
        }
    }
}

/// Mixing amplitudes of the late-time mode,
/// `√(2mω₋) g → α e^{-iω₊t} + β e^{iω₊t}` up to a constant phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoefficients {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl BogoliubovCoefficients {
    pub fn norm_difference(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }
}

/// Both closed forms for the late-time squeezing factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalCandidates {
    /// `2(ω₊/ω₋)²|β|²`.
    pub beta_form: f64,
    /// `[cosh π(ω₊−ω₋)d + cos 2πx] / [2 sinh πω₋d sinh πω₊d]`.
    pub hyperbolic_form: f64,
}

fn check_mass(m: f64) -> Result<()> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("mass", format!("must be positive, got {m}")))
    }
}

/// `ln cosh s` without overflow.
fn ln_cosh(s: f64) -> f64 {
    let a = s.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// Common factor `(2mω₋)^{-1/2} e^{-i(ω₊+ω₋)t/2} (cosh t/d)^{-i(ω₊-ω₋)d/2}`.
fn envelope(p: &TanhParams, m: f64, t: f64) -> Complex64 {
    let (wm, wp, d) = (p.omega_minus(), p.omega_plus(), p.d());
    let phase = -0.5 * (wp + wm) * t - 0.5 * (wp - wm) * d * ln_cosh(t / d);
    Complex64::from_polar((2.0 * m * wm).powf(-0.5), phase)
}

fn hyp_at(h: &HypergeometricParams, t: f64, d: f64, shift: f64) -> Result<Complex64> {
    let y = logistic(2.0 * t / d);
    let one_minus_y = logistic(-2.0 * t / d);
    hyp2f1_split(h.alpha_minus + shift, h.alpha_plus + shift, h.c + shift, y, one_minus_y)
}

/// Exact positive-frequency mode `g(t)` for mass `m`.
pub fn exact_mode(p: &TanhParams, m: f64, t: f64) -> Result<Complex64> {
    check_mass(m)?;
    let h = HypergeometricParams::new(p);
    Ok(envelope(p, m, t) * hyp_at(&h, t, p.d(), 0.0)?)
}

/// `(g, ġ)` of the exact mode.
pub fn exact_mode_with_derivative(p: &TanhParams, m: f64, t: f64) -> Result<(Complex64, Complex64)> {
    check_mass(m)?;
    let h = HypergeometricParams::new(p);
    let (wm, wp, d) = (p.omega_minus(), p.omega_plus(), p.d());
    let env = envelope(p, m, t);
    let f = hyp_at(&h, t, d, 0.0)?;
    let f1 = hyp_at(&h, t, d, 1.0)?;
    let df = h.alpha_minus * h.alpha_plus / h.c * f1;
    let y = logistic(2.0 * t / d);
    let dy_dt = 2.0 * y * logistic(-2.0 * t / d) / d;
    let dphase = Complex64::new(0.0, -0.5 * (wp + wm) - 0.5 * (wp - wm) * (t / d).tanh());
    let g = env * f;
    Ok((g, dphase * g + env * df * dy_dt))
}

/// `g₋(t) = |₂F₁|²`, independent of the mass.
pub fn exact_g_minus(p: &TanhParams, t: f64) -> Result<f64> {
    let h = HypergeometricParams::new(p);
    Ok(hyp_at(&h, t, p.d(), 0.0)?.norm_sqr())
}

/// Gamma-function form of the Bogoliubov coefficients, post-checked
/// against `|α|² − |β|² = ω₋/ω₊`.
pub fn bogoliubov(p: &TanhParams) -> Result<BogoliubovCoefficients> {
    let h = HypergeometricParams::new(p);
    let (a, b, c) = (h.alpha_minus, h.alpha_plus, h.c);
    let ratio = |num: [Complex64; 2], den: [Complex64; 2]| -> Result<Complex64> {
        let r0 = rgamma_complex(den[0]);
        let r1 = rgamma_complex(den[1]);
        if r0 == Complex64::from(0.0) || r1 == Complex64::from(0.0) {
            return Ok(Complex64::from(0.0));
        }
        let ln = log_gamma_complex(num[0])? + log_gamma_complex(num[1])?
            - log_gamma_complex(den[0])?
            - log_gamma_complex(den[1])?;
        Ok(ln.exp())
    };
    let alpha = ratio([c, c - a - b], [c - a, c - b])?;
    let beta = ratio([c, a + b - c], [a, b])?;
    let coeffs = BogoliubovCoefficients { alpha, beta };

    let expected = p.omega_minus() / p.omega_plus();
    let got = coeffs.norm_difference();
    if !((got - expected).abs() <= IDENTITY_TOLERANCE * expected) {
        return Err(Error::IdentityCheck(format!(
            "|α|² − |β|² = {got:e}, expected ω₋/ω₊ = {expected:e}"
        )));
    }
    Ok(coeffs)
}

/// `ln(cosh A + cos 2πx)` for `A ≥ 0`; `-∞` when it vanishes.
fn ln_mix_numerator(a: f64, x: f64) -> f64 {
    if a > 1.0 {
        let e = (-a).exp();
        a - LN_2 + (1.0 + e * e + 2.0 * (2.0 * PI * x).cos() * e).ln()
    } else {
        let s = (0.5 * a).sinh();
        let c = (PI * x).cos();
        (2.0 * s * s + 2.0 * c * c).ln()
    }
}

fn ln_sinh(b: f64) -> f64 {
    if b > 1.0 {
        b - LN_2 + (-(-2.0 * b).exp_m1()).ln()
    } else {
        b.sinh().ln()
    }
}

/// `ln{[cosh A + cos 2πx] / [sinh πω₋d sinh πω₊d]}` for `A = π(ω₊ ∓ ω₋)d`.
fn ln_hyperbolic_ratio(p: &TanhParams, sum: bool) -> f64 {
    let (wm, wp, d) = (p.omega_minus(), p.omega_plus(), p.d());
    let h = HypergeometricParams::new(p);
    let a = PI * d * if sum { wp + wm } else { (wp - wm).abs() };
    ln_mix_numerator(a, h.x) - ln_sinh(PI * wm * d) - ln_sinh(PI * wp * d)
}

/// `(|α|², |β|²)` from the hyperbolic closed forms, evaluated in the log
/// domain so large `ωd` neither overflows nor underflows prematurely.
pub fn bogoliubov_magnitudes(p: &TanhParams) -> (f64, f64) {
    let pref = 0.5 * p.omega_minus() / p.omega_plus();
    let alpha2 = pref * ln_hyperbolic_ratio(p, true).exp();
    let beta2 = pref * ln_hyperbolic_ratio(p, false).exp();
    (alpha2, beta2)
}

/// Closed-form candidates for `lim 𝒮` as `t → ∞`.
pub fn terminal_sfactor(p: &TanhParams) -> TerminalCandidates {
    let r = p.omega_plus() / p.omega_minus();
    let (_, beta2) = bogoliubov_magnitudes(p);
    TerminalCandidates {
        beta_form: 2.0 * r * r * beta2,
        hyperbolic_form: 0.5 * ln_hyperbolic_ratio(p, false).exp(),
    }
}

/// `[½(√(ω₊/ω₋) − √(ω₋/ω₊))]²`.
pub fn sudden_jump_sfactor(omega_minus: f64, omega_plus: f64) -> Result<f64> {
    for (name, w) in [("omega_minus", omega_minus), ("omega_plus", omega_plus)] {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::invalid(name, format!("must be positive, got {w}")));
        }
    }
    let r = (omega_plus / omega_minus).sqrt();
    Ok((0.5 * (r - 1.0 / r)).powi(2))
}

/// `1/(e^{2πω₋d} − 1)`; zero once the exponential overflows.
pub fn large_ratio_sfactor(omega_minus_d: f64) -> Result<f64> {
    if !(omega_minus_d > 0.0) {
        return Err(Error::invalid(
            "omega_minus_d",
            format!("must be positive, got {omega_minus_d}"),
        ));
    }
    let den = (2.0 * PI * omega_minus_d).exp_m1();
    Ok(if den.is_finite() { 1.0 / den } else { 0.0 })
}
