//! Thermodynamics of the invariant thermal state.
//!
//! The state `ρ ∝ exp(−Î/T₀)` keeps its spectral parameter `ε = ω_I/T₀`
//! under unitary evolution, so the entropy is fixed and everything else
//! follows from `ε` and the effective frequency `ω_eff = ω + ω_I 𝒮`.
//! Units: `ħ = k_B = 1`.

use crate::quadrature::{cumulative_integral, derivative};
use crate::{Error, Result};

const SMALL_EPS: f64 = 1e-6;
const LARGE_EPS: f64 = 30.0;

/// Points with `|Ω′|` below this fraction of `max |Ω′|` do not determine
/// `dω/dt` during reconstruction; the rate is interpolated across them.
pub const RELIABLE_FRACTION: f64 = 1e-6;

/// Relative slack before a negative `(ġ₋/ω_I)²/8` is called a violation.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-3;

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("epsilon", format!("must be positive, got {eps}")))
    }
}

/// `S = ε/(e^ε − 1) − ln(1 − e^{−ε})`.
pub fn entropy_from_eps(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(if eps < SMALL_EPS {
        1.0 - eps.ln() + eps * eps / 24.0
    } else if eps > LARGE_EPS {
        let e = (-eps).exp();
        e * (1.0 + eps) + e * e * (eps + 0.5)
    } else {
        // ln(1 − e^{−ε}) through whichever of 1 − e^{−ε} or e^{−ε} is exact
        let log_gap = if eps < std::f64::consts::LN_2 {
            (-(-eps).exp_m1()).ln()
        } else {
            (-(-eps).exp()).ln_1p()
        };
        eps / eps.exp_m1() - log_gap
    })
}

/// `dS/dε = −ε / (4 sinh²(ε/2))`.
pub fn entropy_slope(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let s = (0.5 * eps).sinh();
    Ok(if s.is_finite() { -eps / (4.0 * s * s) } else { 0.0 })
}

/// First-order entropy change `δS = −ε δε / (4 sinh²(ε/2))`.
pub fn entropy_variation(eps: f64, d_eps: f64) -> Result<f64> {
    Ok(entropy_slope(eps)? * d_eps)
}

/// Inverse of [`entropy_from_eps`] to relative accuracy `1e-12` or better.
pub fn eps_from_entropy(s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::invalid("entropy", format!("must be positive, got {s}")));
    }
    // Work in u = ln ε, where ln S is smooth and monotone.
    let target = s.ln();
    let f = |u: f64| -> Result<f64> { Ok(entropy_from_eps(u.exp())?.ln() - target) };
    let (mut lo, mut hi) = (-700.0f64, 7.0f64);
    if f(lo)? < 0.0 {
        return Err(Error::invalid("entropy", format!("{s} needs ε below double range")));
    }
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::invalid("entropy", format!("{s} needs ε above double range")));
        }
    }
    // Newton steps kept inside the bracket, bisection otherwise.
    let mut u = if s > 15.0 { 1.0 - s } else { 0.5 * (lo + hi) };
    u = u.clamp(lo, hi);
    for _ in 0..200 {
        let fu = f(u)?;
        if fu == 0.0 {
            return Ok(u.exp());
        }
        if fu > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let eps = u.exp();
        let dfu = entropy_slope(eps)? * eps / entropy_from_eps(eps)?;
        let newton = u - fu / dfu;
        let next = if dfu < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - u).abs() <= 1e-15 * u.abs().max(1.0) || hi - lo <= 1e-15 * u.abs().max(1.0) {
            return Ok(next.exp());
        }
        u = next;
    }
    Ok(u.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonEntropyPair {
    pub epsilon: f64,
    pub entropy: f64,
}

impl EpsilonEntropyPair {
    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        Ok(Self {
            epsilon,
            entropy: entropy_from_eps(epsilon)?,
        })
    }

    pub fn from_entropy(entropy: f64) -> Result<Self> {
        Ok(Self {
            epsilon: eps_from_entropy(entropy)?,
            entropy,
        })
    }
}

fn coth_half(eps: f64) -> f64 {
    1.0 / (0.5 * eps).tanh()
}

/// `F_ω = −½ coth(ε/2)`.
pub fn force(eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(-0.5 * coth_half(eps))
}

/// Invariant thermal state seen at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    pub omega: f64,
    pub omega_i: f64,
    /// `Ω = ω_I 𝒮`.
    pub big_omega: f64,
    pub epsilon: f64,
}

impl ThermalState {
    pub fn new(omega: f64, omega_i: f64, big_omega: f64, epsilon: f64) -> Result<Self> {
        for (name, v) in [("omega", omega), ("omega_i", omega_i)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(big_omega.is_finite() && big_omega >= 0.0) {
            return Err(Error::invalid(
                "big_omega",
                format!("must be non-negative, got {big_omega}"),
            ));
        }
        check_eps(epsilon)?;
        Ok(Self {
            omega,
            omega_i,
            big_omega,
            epsilon,
        })
    }

    pub fn from_squeezing(omega: f64, omega_i: f64, s: f64, epsilon: f64) -> Result<Self> {
        Self::new(omega, omega_i, omega_i * s, epsilon)
    }

    /// State with `T₀ = ω_I/ε` given instead of `ε`.
    pub fn from_initial_temperature(omega: f64, omega_i: f64, big_omega: f64, t0: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::invalid("T0", format!("must be positive, got {t0}")));
        }
        Self::new(omega, omega_i, big_omega, omega_i / t0)
    }

    pub fn omega_eff(&self) -> f64 {
        self.omega + self.big_omega
    }

    pub fn squeezing(&self) -> f64 {
        self.big_omega / self.omega_i
    }

    pub fn initial_temperature(&self) -> f64 {
        self.omega_i / self.epsilon
    }

    pub fn entropy(&self) -> f64 {
        entropy_from_eps(self.epsilon).unwrap_or(f64::NAN)
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.omega_eff() * coth_half(self.epsilon)
    }

    pub fn temperature(&self) -> f64 {
        self.omega_eff() / self.epsilon
    }

    pub fn force(&self) -> f64 {
        -0.5 * coth_half(self.epsilon)
    }

    pub fn squeezing_parameter(&self) -> f64 {
        squeezing_parameter(self.squeezing(), self.omega, self.omega_i).unwrap_or(f64::NAN)
    }

    pub fn husimi_q(&self) -> f64 {
        1.0 + self.big_omega / self.omega
    }
}

pub fn energy(state: &ThermalState) -> f64 {
    state.energy()
}

pub fn temperature(state: &ThermalState) -> f64 {
    state.temperature()
}

/// Energy written through the mode scale:
/// `(ω/4)(ω_I/(g₋ω) + ωg₋/ω_I + ġ₋²/(4ω_I ω g₋)) coth(ε/2)`.
pub fn energy_from_mode(g_minus: f64, dg_minus: f64, omega: f64, omega_i: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    for (name, v) in [("g_minus", g_minus), ("omega", omega), ("omega_i", omega_i)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be positive, got {v}")));
        }
    }
    let bracket = omega_i / (g_minus * omega)
        + omega * g_minus / omega_i
        + dg_minus * dg_minus / (4.0 * omega_i * omega * g_minus);
    Ok(0.25 * omega * bracket * coth_half(eps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstLaw {
    /// Exact `E(ω_eff + δω_eff, S + δS) − E(ω_eff, S)`.
    pub delta_energy: f64,
    /// `−F_ω δω_eff`.
    pub work: f64,
    /// `T δS`.
    pub heat: f64,
    pub residual: f64,
}

/// Second-order remainder of `δE = −F_ω δω_eff + T δS`.
pub fn first_law_residual(state: &ThermalState, d_omega_eff: f64, d_entropy: f64) -> Result<FirstLaw> {
    let w_eff = state.omega_eff();
    let s = state.entropy();
    let w_new = w_eff + d_omega_eff;
    if !(w_new > 0.0) {
        return Err(Error::invalid(
            "d_omega_eff",
            format!("perturbed ω_eff = {w_new} must stay positive"),
        ));
    }
    let s_new = s + d_entropy;
    if !(s_new > 0.0) {
        return Err(Error::invalid(
            "d_entropy",
            format!("perturbed entropy {s_new} must stay positive"),
        ));
    }
    let eps_new = if d_entropy == 0.0 {
        state.epsilon
    } else {
        eps_from_entropy(s_new)?
    };
    let delta_energy = 0.5 * w_new * coth_half(eps_new) - state.energy();
    let work = -state.force() * d_omega_eff;
    let heat = state.temperature() * d_entropy;
    Ok(FirstLaw {
        delta_energy,
        work,
        heat,
        residual: delta_energy - work - heat,
    })
}

/// `r = arcsinh √(𝒮 ω_I / (2ω))`.
pub fn squeezing_parameter(s: f64, omega: f64, omega_i: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::invalid("S", format!("must be non-negative, got {s}")));
    }
    if !(omega > 0.0 && omega_i > 0.0) {
        return Err(Error::invalid("omega", "frequencies must be positive"));
    }
    Ok((s * omega_i / (2.0 * omega)).sqrt().asinh())
}

/// `Q = 1 + 𝒮 ω_I / ω`.
pub fn husimi_q(s: f64, omega: f64, omega_i: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be positive, got {omega}")));
    }
    Ok(1.0 + s * omega_i / omega)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub times: Vec<f64>,
    pub omega: Vec<f64>,
    pub big_omega: Vec<f64>,
    pub g_minus: Vec<f64>,
    pub dg_minus: Vec<f64>,
    pub omega_i: f64,
}

impl Reconstruction {
    /// `T(t) = (ω + Ω)/ε`.
    pub fn temperature(&self, eps: f64) -> Result<Vec<f64>> {
        check_eps(eps)?;
        Ok(self
            .omega
            .iter()
            .zip(&self.big_omega)
            .map(|(w, o)| (w + o) / eps)
            .collect())
    }
}

/// Recovers `ω(t)`, `g₋(t)` and `ġ₋(t)` from a prescribed squeezing
/// schedule `Ω(t)` together with `Ω′ = dΩ/dω` sampled on the same times.
///
/// The frequency follows `dω/dt = (dΩ/dt)/Ω′`. Where `|Ω′|` is too small
/// to divide by, the rate is interpolated from neighbouring samples (and
/// taken as zero outside them). Then `g₋ = (ω_I/ω)(1 + Ω′)` and
/// `(ġ₋/ω_I)²/8 = (1 + Ω′)Ω/ω − Ω′²/2`, with the sign of `ġ₋` read off
/// the slope of `g₋`.
pub fn reconstruct_from_omega_prime(
    times: &[f64],
    big_omega: &[f64],
    omega_prime: &[f64],
    omega_i: f64,
    omega_start: f64,
) -> Result<Reconstruction> {
    let n = times.len();
    if big_omega.len() != n || omega_prime.len() != n {
        return Err(Error::invalid("schedule", "t, Ω and Ω′ must have equal length"));
    }
    if n < 2 {
        return Err(Error::invalid("schedule", "needs at least two samples"));
    }
    if let Some(k) = (1..n).find(|&k| !(times[k] > times[k - 1])) {
        return Err(Error::invalid(
            "schedule",
            format!("times must increase strictly, violated at t = {}", times[k]),
        ));
    }
    for (name, v) in [("omega_i", omega_i), ("omega_start", omega_start)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("must be positive, got {v}")));
        }
    }
    for k in 0..n {
        if !(big_omega[k].is_finite() && big_omega[k] >= 0.0) {
            return Err(Error::invalid(
                "Omega",
                format!(
                    "must be finite and non-negative, got {} at t = {}",
                    big_omega[k], times[k]
                ),
            ));
        }
        if !(omega_prime[k].is_finite() && omega_prime[k] > -1.0) {
            return Err(Error::invalid(
                "Omega_prime",
                format!("must exceed -1, got {} at t = {}", omega_prime[k], times[k]),
            ));
        }
    }

    let d_big = derivative(times, big_omega, 1, 5);
    let peak = omega_prime.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = RELIABLE_FRACTION * peak;
    let reliable: Vec<usize> = (0..n)
        .filter(|&k| peak > 0.0 && omega_prime[k].abs() >= floor)
        .collect();
    let mut rate = vec![0.0; n];
    for &k in &reliable {
        rate[k] = d_big[k] / omega_prime[k];
    }
    for pair in reliable.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for k in a + 1..b {
            let w = (times[k] - times[a]) / (times[b] - times[a]);
            rate[k] = rate[a] * (1.0 - w) + rate[b] * w;
        }
    }

    let omega: Vec<f64> = cumulative_integral(times, &rate)
        .into_iter()
        .map(|x| omega_start + x)
        .collect();
    if let Some(k) = omega.iter().position(|&w| !(w > 0.0)) {
        return Err(Error::NonPositiveFrequency {
            t: times[k],
            value: omega[k],
        });
    }

    let g_minus: Vec<f64> = (0..n).map(|k| omega_i / omega[k] * (1.0 + omega_prime[k])).collect();
    let slope = derivative(times, &g_minus, 1, 5);
    let mut dg_minus = Vec::with_capacity(n);
    let mut sign = 1.0;
    for k in 0..n {
        let a = (1.0 + omega_prime[k]) * big_omega[k] / omega[k];
        let b = 0.5 * omega_prime[k] * omega_prime[k];
        let q = a - b;
        if q < -(CONSTRAINT_TOLERANCE * (a + b) + 1e-14) {
            return Err(Error::ConstraintViolation { t: times[k], value: q });
        }
        if slope[k] > 0.0 {
            sign = 1.0;
        } else if slope[k] < 0.0 {
            sign = -1.0;
        }
        dg_minus.push(sign * omega_i * (8.0 * q.max(0.0)).sqrt());
    }

    Ok(Reconstruction {
        times: times.to_vec(),
        omega,
        big_omega: big_omega.to_vec(),
        g_minus,
        dg_minus,
        omega_i,
    })
}
