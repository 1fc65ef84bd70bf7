//! Mode integration and the quantities derived from it.
//!
//! The solver works with the dimensionless mode `u = √(2mω_I) g`, so the
//! mass only enters when `g` and `ġ` are reported back.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ode;
use crate::profiles::{FrequencyProfile, TanhParams};
use crate::quadrature::{cumulative_integral, cumulative_trapezoid, derivative, interp_linear};
use crate::{Error, Result};

/// Normalization tolerance on `m·Im(g₀*ġ₀) = −1/2`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Default output density per shortest oscillation period.
pub const POINTS_PER_PERIOD: usize = 64;

/// Below this many points per period, integrated series carry a warning.
pub const MIN_POINTS_PER_PERIOD: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeInitialCondition {
    pub t0: f64,
    pub g0: Complex64,
    pub gdot0: Complex64,
    pub mass: f64,
    pub omega_i: f64,
}

impl ModeInitialCondition {
    pub fn new(t0: f64, g0: Complex64, gdot0: Complex64, mass: f64, omega_i: f64) -> Result<Self> {
        check_positive("mass", mass)?;
        check_positive("omega_i", omega_i)?;
        if !t0.is_finite() {
            return Err(Error::invalid("t0", "must be finite"));
        }
        let w = mass * (g0.conj() * gdot0).im;
        if !((w + 0.5).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::invalid(
                "initial_condition",
                format!("m·Im(g₀*ġ₀) = {w}, expected -1/2"),
            ));
        }
        Ok(Self {
            t0,
            g0,
            gdot0,
            mass,
            omega_i,
        })
    }

    /// Mode with prescribed `(g₋, ġ₋)` at `t0` and zero invariant phase,
    /// for restarting from an arbitrary squeezed state.
    pub fn from_scale(t0: f64, g_minus: f64, dg_minus: f64, mass: f64, omega_i: f64) -> Result<Self> {
        check_positive("g_minus", g_minus)?;
        check_positive("mass", mass)?;
        check_positive("omega_i", omega_i)?;
        if !dg_minus.is_finite() {
            return Err(Error::invalid("dg_minus", "must be finite"));
        }
        let g0 = Complex64::from((g_minus / (2.0 * mass * omega_i)).sqrt());
        let gdot0 = Complex64::new(
            dg_minus / (2.0 * (2.0 * mass * omega_i * g_minus).sqrt()),
            -(omega_i / (2.0 * mass * g_minus)).sqrt(),
        );
        Self::new(t0, g0, gdot0, mass, omega_i)
    }
}

/// Pure positive-frequency mode at `t0`, with `ω_I = ω(t0)`.
pub fn positive_mode_ic(profile: &FrequencyProfile, t0: f64, mass: f64) -> Result<ModeInitialCondition> {
    let w = profile.omega(t0)?;
    check_positive("mass", mass)?;
    let g0 = Complex64::from(1.0 / (2.0 * mass * w).sqrt());
    ModeInitialCondition::new(t0, g0, Complex64::new(0.0, -w) * g0, mass, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Abort once the relative Wronskian drift exceeds this.
    pub drift_limit: Option<f64>,
}

impl Default for ModeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
            drift_limit: Some(1e-6),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub mass: f64,
    pub omega_i: f64,
    pub times: Vec<f64>,
    pub g: Vec<Complex64>,
    pub gdot: Vec<Complex64>,
    pub g_minus: Vec<f64>,
    pub dg_minus: Vec<f64>,
    pub stats: ode::Stats,
}

impl ModeTrajectory {
    /// `m·Im(g*ġ)` at every sample.
    pub fn wronskian(&self) -> Vec<f64> {
        self.g
            .iter()
            .zip(&self.gdot)
            .map(|(g, gd)| self.mass * (g.conj() * gd).im)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Uniform grid on `[t0, t_end]` with `points_per_period` samples per
/// shortest period `2π / max ω`.
pub fn uniform_grid(profile: &FrequencyProfile, t0: f64, t_end: f64, points_per_period: usize) -> Result<Vec<f64>> {
    if !(t_end > t0) {
        return Err(Error::invalid("t_end", format!("must exceed t0 = {t0}")));
    }
    if points_per_period == 0 {
        return Err(Error::invalid("points_per_period", "must be positive"));
    }
    let period = 2.0 * PI / profile.max_omega(t0, t_end)?;
    let n = ((t_end - t0) / period * points_per_period as f64).ceil() as usize + 1;
    Ok(crate::quadrature::linspace(t0, t_end, n.max(2)))
}

/// Solves `g̈ + ω²(t) g = 0` from `ic` to `t_end` and samples it on `grid`.
pub fn integrate_mode(
    profile: &FrequencyProfile,
    ic: &ModeInitialCondition,
    t_end: f64,
    grid: &[f64],
    opts: &ModeOptions,
) -> Result<ModeTrajectory> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("output_grid", "times must be strictly increasing"));
    }
    let scale = (2.0 * ic.mass * ic.omega_i).sqrt();
    let u0 = ic.g0 * scale;
    let v0 = ic.gdot0 * scale;
    let y0 = [u0.re, u0.im, v0.re, v0.im];
    let w0 = wronskian_scaled(&y0);

    let rhs = |t: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let w2 = profile.omega_squared(t)?;
        Ok([y[2], y[3], -w2 * y[0], -w2 * y[1]])
    };
    let monitor = |t: f64, y: &[f64; 4]| -> Result<()> {
        if let Some(limit) = opts.drift_limit {
            let drift = ((wronskian_scaled(y) - w0) / w0).abs();
            if !(drift <= limit) {
                return Err(Error::InvariantDrift { t, drift, limit });
            }
        }
        Ok(())
    };
    let ode_opts = ode::Options {
        rtol: opts.rtol,
        atol: opts.atol,
        max_steps: opts.max_steps,
        h_max: None,
    };
    let (ys, stats) = ode::integrate(rhs, ic.t0, y0, t_end, grid, &ode_opts, monitor)?;

    let n = ys.len();
    let mut traj = ModeTrajectory {
        mass: ic.mass,
        omega_i: ic.omega_i,
        times: grid.to_vec(),
        g: Vec::with_capacity(n),
        gdot: Vec::with_capacity(n),
        g_minus: Vec::with_capacity(n),
        dg_minus: Vec::with_capacity(n),
        stats,
    };
    for y in &ys {
        let u = Complex64::new(y[0], y[1]);
        let v = Complex64::new(y[2], y[3]);
        traj.g.push(u / scale);
        traj.gdot.push(v / scale);
        traj.g_minus.push(u.norm_sqr());
        traj.dg_minus.push(2.0 * (u.conj() * v).re);
    }
    Ok(traj)
}

// Im(u* u̇) = 2ω_I m Im(g* ġ)
fn wronskian_scaled(y: &[f64; 4]) -> f64 {
    y[0] * y[3] - y[1] * y[2]
}

/// Largest relative deviation of `m·Im(g*ġ)` from its first sample.
pub fn wronskian_drift(traj: &ModeTrajectory) -> f64 {
    let w = traj.wronskian();
    let Some(&w0) = w.first() else {
        return 0.0;
    };
    w.iter().map(|x| ((x - w0) / w0).abs()).fold(0.0, f64::max)
}

/// `𝒮 = ḣ²/(2ω_I²) + ½(1/h − ωh/ω_I)²` with `h = √g₋`.
pub fn squeezing_factor(g_minus: f64, dg_minus: f64, omega: f64, omega_i: f64) -> Result<f64> {
    check_positive("g_minus", g_minus)?;
    check_positive("omega", omega)?;
    check_positive("omega_i", omega_i)?;
    let h = g_minus.sqrt();
    let hdot = dg_minus / (2.0 * h);
    let v = 1.0 / h - omega * h / omega_i;
    Ok(hdot * hdot / (2.0 * omega_i * omega_i) + 0.5 * v * v)
}

/// `𝒜̸ = d𝒮/dt = (g₋ − ω_I/ω) (dω²/dt) / (2ω_I²)`.
pub fn nonadiabaticity(g_minus: f64, omega2: f64, domega2_dt: f64, omega_i: f64) -> Result<f64> {
    check_positive("omega_squared", omega2)?;
    check_positive("omega_i", omega_i)?;
    Ok((g_minus - omega_i / omega2.sqrt()) * domega2_dt / (2.0 * omega_i * omega_i))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCoeffs {
    pub g_plus: f64,
    pub g_zero: f64,
    pub g_minus: f64,
    pub omega_i: f64,
}

impl InvariantCoeffs {
    /// `√(g₊g₋ − g₀²)`, which reproduces `ω_I`.
    pub fn invariant_frequency(&self) -> f64 {
        (self.g_plus * self.g_minus - self.g_zero * self.g_zero).sqrt()
    }
}

pub fn invariant_coeffs(g_minus: f64, dg_minus: f64, omega_i: f64) -> Result<InvariantCoeffs> {
    check_positive("g_minus", g_minus)?;
    check_positive("omega_i", omega_i)?;
    Ok(InvariantCoeffs {
        g_plus: omega_i * omega_i / g_minus * (1.0 + dg_minus * dg_minus / (4.0 * omega_i * omega_i)),
        g_zero: -0.5 * dg_minus,
        g_minus,
        omega_i,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeRecord {
    pub times: Vec<f64>,
    pub omega: Vec<f64>,
    pub s: Vec<f64>,
    pub a_slash: Vec<f64>,
    /// `Ω = ω_I 𝒮`.
    pub big_omega: Vec<f64>,
    pub omega_eff: Vec<f64>,
}

/// Pointwise `𝒮`, `𝒜̸`, `Ω` and `ω_eff` along a trajectory.
pub fn squeeze_record(traj: &ModeTrajectory, profile: &FrequencyProfile) -> Result<SqueezeRecord> {
    let n = traj.len();
    let mut rec = SqueezeRecord {
        times: traj.times.clone(),
        omega: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        a_slash: Vec::with_capacity(n),
        big_omega: Vec::with_capacity(n),
        omega_eff: Vec::with_capacity(n),
    };
    for k in 0..n {
        let t = traj.times[k];
        let w2 = profile.omega_squared(t)?;
        let w = w2.sqrt();
        let s = squeezing_factor(traj.g_minus[k], traj.dg_minus[k], w, traj.omega_i)?;
        let a = nonadiabaticity(traj.g_minus[k], w2, profile.domega2_dt(t)?, traj.omega_i)?;
        rec.omega.push(w);
        rec.s.push(s);
        rec.a_slash.push(a);
        rec.big_omega.push(traj.omega_i * s);
        rec.omega_eff.push(w + traj.omega_i * s);
    }
    Ok(rec)
}

/// Raised when an integrated series comes from a grid that under-resolves
/// the oscillation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseGrid {
    pub points_per_period: f64,
    /// Largest gap between the fourth-order and trapezoidal integrals.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub warning: Option<CoarseGrid>,
}

fn integrate_series(times: &[f64], integrand: &[f64], offset: f64, max_omega: f64) -> IntegratedSeries {
    let mut values = cumulative_integral(times, integrand);
    let max_gap = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let ppp = if max_gap > 0.0 {
        2.0 * PI / max_omega / max_gap
    } else {
        f64::INFINITY
    };
    let warning = (ppp < MIN_POINTS_PER_PERIOD).then(|| {
        let trap = cumulative_trapezoid(times, integrand);
        let err = values.iter().zip(&trap).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        CoarseGrid {
            points_per_period: ppp,
            estimated_error: err,
        }
    });
    for v in &mut values {
        *v += offset;
    }
    IntegratedSeries {
        times: times.to_vec(),
        values,
        warning,
    }
}

/// `𝒮(t)` from integrating `𝒜̸` along the trajectory, starting from the
/// pointwise value at the first sample.
pub fn squeezing_factor_integral(traj: &ModeTrajectory, profile: &FrequencyProfile) -> Result<IntegratedSeries> {
    if traj.is_empty() {
        return Err(Error::invalid("trajectory", "is empty"));
    }
    let rec = squeeze_record(traj, profile)?;
    let (t0, t1) = (traj.times[0], traj.times[traj.len() - 1]);
    let wmax = if t1 > t0 {
        profile.max_omega(t0, t1)?
    } else {
        rec.omega[0]
    };
    Ok(integrate_series(&traj.times, &rec.a_slash, rec.s[0], wmax))
}

/// Invariant phase `Θ(t) = ω_I ∫ dτ / g₋`, zero at the first sample.
///
/// Sampling density is judged against the oscillation of `g₋` itself.
pub fn theta_phase(traj: &ModeTrajectory) -> Result<IntegratedSeries> {
    if let Some(k) = traj.g_minus.iter().position(|&g| !(g > 0.0)) {
        return Err(Error::invalid(
            "g_minus",
            format!("must be positive, got {} at t = {}", traj.g_minus[k], traj.times[k]),
        ));
    }
    let integrand: Vec<f64> = traj.g_minus.iter().map(|g| traj.omega_i / g).collect();
    // g₋ oscillates at twice the local frequency, and ω_I/g₋ bounds ω.
    let wmax = integrand.iter().cloned().fold(0.0, f64::max);
    Ok(integrate_series(&traj.times, &integrand, 0.0, wmax))
}

/// Largest residual of `ḧ + ω²h − ω_I²/h³` relative to `max |ω²h|`, with
/// `ḧ` from finite differences on the output grid.
pub fn ermakov_residual(traj: &ModeTrajectory, profile: &FrequencyProfile) -> Result<f64> {
    let h: Vec<f64> = traj.g_minus.iter().map(|g| g.sqrt()).collect();
    let hdd = derivative(&traj.times, &h, 2, 5);
    let wi2 = traj.omega_i * traj.omega_i;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..h.len() {
        let w2 = profile.omega_squared(traj.times[k])?;
        worst = worst.max((hdd[k] + w2 * h[k] - wi2 / h[k].powi(3)).abs());
        scale = scale.max((w2 * h[k]).abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Mean of `values` over the trailing `window` of `times`.
pub fn trailing_average(times: &[f64], values: &[f64], window: f64) -> Result<f64> {
    let n = times.len().min(values.len());
    if n < 2 {
        return Err(Error::invalid("series", "needs at least two samples"));
    }
    let span = times[n - 1] - times[0];
    if !(window > 0.0 && window <= span) {
        return Err(Error::invalid(
            "window",
            format!("must lie in (0, {span}], got {window}"),
        ));
    }
    let c = cumulative_integral(&times[..n], &values[..n]);
    let start = interp_linear(&times[..n], &c, times[n - 1] - window);
    Ok((c[n - 1] - start) / window)
}

/// Simulation span `[−N d, N d + 4π/ω₊]` for the tanh profile.
pub fn tanh_span(p: &TanhParams, n_trunc: f64) -> (f64, f64) {
    let d = p.d();
    (-n_trunc * d, n_trunc * d + late_window(p))
}

/// Four late-time periods `π/ω₊` of the `𝒮` oscillation.
pub fn late_window(p: &TanhParams) -> f64 {
    4.0 * PI / p.omega_plus()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TanhRun {
    pub trajectory: ModeTrajectory,
    pub record: SqueezeRecord,
    /// `𝒮` averaged over the last four periods `π/ω₊`.
    pub terminal_s: f64,
}

/// Integrates the positive-mode solution across a tanh step.
pub fn run_tanh(
    p: &TanhParams,
    mass: f64,
    n_trunc: f64,
    opts: &ModeOptions,
    points_per_period: usize,
) -> Result<TanhRun> {
    check_positive("n_trunc", n_trunc)?;
    let profile = FrequencyProfile::Tanh(*p);
    let (t0, t1) = tanh_span(p, n_trunc);
    let grid = uniform_grid(&profile, t0, t1, points_per_period)?;
    let ic = positive_mode_ic(&profile, t0, mass)?;
    let trajectory = integrate_mode(&profile, &ic, t1, &grid, opts)?;
    let record = squeeze_record(&trajectory, &profile)?;
    let terminal_s = trailing_average(&record.times, &record.s, late_window(p))?;
    Ok(TanhRun {
        trajectory,
        record,
        terminal_s,
    })
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use proptest::prelude::*;

    fn fig1() -> TanhParams {
        TanhParams::from_frequencies(5.0, 1.0, 3.0, 1.0).unwrap()
    }

    #[test]
    fn positive_mode_ic_for_constant_profile() {
        let p = FrequencyProfile::constant(1.0).unwrap();
        let ic = positive_mode_ic(&p, 0.0, 1.0).unwrap();
        let r = 0.5f64.sqrt();
        assert!((ic.g0 - Complex64::from(r)).norm() < 1e-15);
        assert!((ic.gdot0 - Complex64::new(0.0, -r)).norm() < 1e-15);
        assert!((ic.mass * (ic.g0.conj() * ic.gdot0).im + 0.5).abs() < 1e-15);
    }

    #[test]
    fn tanh_ic_starts_at_unit_scale() {
        let p = fig1();
        let prof = FrequencyProfile::Tanh(p);
        let ic = positive_mode_ic(&prof, -8.0 * p.d(), 3.0).unwrap();
        assert!((ic.omega_i - p.omega_minus()).abs() < 1e-6);
        let gm = 2.0 * ic.mass * ic.omega_i * ic.g0.norm_sqr();
        let dgm = 2.0 * ic.mass * ic.omega_i * 2.0 * (ic.g0.conj() * ic.gdot0).re;
        assert!((gm - 1.0).abs() < 1e-15 && dgm.abs() < 1e-15);
    }

    #[test]
    fn unnormalized_ic_is_rejected() {
        let g = Complex64::from(1.0);
        assert!(ModeInitialCondition::new(0.0, g, Complex64::new(0.0, -0.4), 1.0, 1.0).is_err());
        assert!(ModeInitialCondition::new(0.0, g, Complex64::new(0.0, -0.5), 1.0, 1.0).is_ok());
    }

    #[test]
    fn restart_ic_reproduces_scale() {
        let ic = ModeInitialCondition::from_scale(1.0, 0.4, -0.3, 2.0, 1.5).unwrap();
        let gm = 2.0 * ic.mass * ic.omega_i * ic.g0.norm_sqr();
        let dgm = 2.0 * ic.mass * ic.omega_i * 2.0 * (ic.g0.conj() * ic.gdot0).re;
        assert!((gm - 0.4).abs() < 1e-15 && (dgm + 0.3).abs() < 1e-15);
    }

    #[test]
    fn constant_profile_keeps_unit_scale() {
        let p = FrequencyProfile::constant(2.0).unwrap();
        let ic = positive_mode_ic(&p, 0.0, 1.0).unwrap();
        let grid = uniform_grid(&p, 0.0, 30.0, POINTS_PER_PERIOD).unwrap();
        let tr = integrate_mode(&p, &ic, 30.0, &grid, &ModeOptions::default()).unwrap();
        for (gm, dgm) in tr.g_minus.iter().zip(&tr.dg_minus) {
            assert!((gm - 1.0).abs() < 1e-9 && dgm.abs() < 1e-8);
        }
        let rec = squeeze_record(&tr, &p).unwrap();
        assert!(rec.s.iter().all(|&s| s.abs() < 1e-9));
        assert!(rec.a_slash.iter().all(|&a| a == 0.0));
        let th = theta_phase(&tr).unwrap();
        for (t, v) in th.times.iter().zip(&th.values) {
            assert!((v - 2.0 * t).abs() < 1e-8);
        }
        let si = squeezing_factor_integral(&tr, &p).unwrap();
        assert!(si.values.iter().all(|&s| s.abs() < 1e-9));
    }

    #[test]
    fn matches_exact_solution() {
        let p = fig1();
        let prof = FrequencyProfile::Tanh(p);
        let (t0, t1) = (-16.0, 5.0);
        let ic = positive_mode_ic(&prof, t0, 1.0).unwrap();
        let grid: Vec<f64> = (0..=200).map(|k| -5.0 + 0.05 * k as f64).collect();
        let tr = integrate_mode(&prof, &ic, t1, &grid, &ModeOptions::default()).unwrap();
        for (t, gm) in grid.iter().zip(&tr.g_minus) {
            let exact = analytic::exact_g_minus(&p, *t).unwrap();
            assert!(((gm - exact) / exact).abs() < 1e-6, "t = {t}");
        }
        assert!(wronskian_drift(&tr) < 1e-9);
    }

    #[test]
    fn late_scale_oscillates_at_twice_final_frequency() {
        let p = fig1();
        let run = run_tanh(&p, 1.0, 10.0, &ModeOptions::default(), POINTS_PER_PERIOD).unwrap();
        let tr = &run.trajectory;
        let late: Vec<usize> = (0..tr.len()).filter(|&k| tr.times[k] > 8.0).collect();
        let mean = late.iter().map(|&k| tr.g_minus[k]).sum::<f64>() / late.len() as f64;
        // centre close to ω_I/ω₊
        assert!((mean - 1.0 / 3.0).abs() < 0.02, "{mean}");
        // crossings of the mean are spaced by half of π/ω₊
        let crossings: Vec<f64> = late
            .windows(2)
            .filter(|w| (tr.g_minus[w[0]] - mean) * (tr.g_minus[w[1]] - mean) < 0.0)
            .map(|w| tr.times[w[0]])
            .collect();
        let gaps: Vec<f64> = crossings.windows(2).map(|c| c[1] - c[0]).collect();
        let avg = gaps.iter().sum::<f64>() / gaps.len() as f64;
        assert!((avg - PI / 6.0).abs() < 0.02, "{avg}");
    }

    #[test]
    fn mass_drops_out() {
        let p = FrequencyProfile::Tanh(fig1());
        let grid = uniform_grid(&p, -10.0, 10.0, 32).unwrap();
        let a = positive_mode_ic(&p, -10.0, 1.0).unwrap();
        let b = positive_mode_ic(&p, -10.0, 100.0).unwrap();
        assert!((a.g0 / b.g0 - Complex64::from(10.0)).norm() < 1e-14);
        let ta = integrate_mode(&p, &a, 10.0, &grid, &ModeOptions::default()).unwrap();
        let tb = integrate_mode(&p, &b, 10.0, &grid, &ModeOptions::default()).unwrap();
        for (x, y) in ta.g_minus.iter().zip(&tb.g_minus) {
            assert!((x - y).abs() < 1e-12 * x);
        }
    }

    #[test]
    fn loose_tolerance_is_flagged() {
        let p = FrequencyProfile::Tanh(fig1());
        let grid = uniform_grid(&p, -10.0, 30.0, 16).unwrap();
        let ic = positive_mode_ic(&p, -10.0, 1.0).unwrap();
        let loose = ModeOptions {
            rtol: 1e-3,
            atol: 1e-3,
            drift_limit: None,
            ..ModeOptions::default()
        };
        let tr = integrate_mode(&p, &ic, 30.0, &grid, &loose).unwrap();
        assert!(wronskian_drift(&tr) > 1e-6);
        let flagged = ModeOptions {
            drift_limit: Some(1e-6),
            ..loose
        };
        assert!(matches!(
            integrate_mode(&p, &ic, 30.0, &grid, &flagged),
            Err(Error::InvariantDrift { .. })
        ));
    }

    #[test]
    fn integral_of_nonadiabaticity_tracks_pointwise_value() {
        let p = fig1();
        let prof = FrequencyProfile::Tanh(p);
        // trapezoids need the finer grid to reach 1e-5
        let run = run_tanh(&p, 1.0, 10.0, &ModeOptions::default(), 2 * POINTS_PER_PERIOD).unwrap();
        let tr = &run.trajectory;
        let si = squeezing_factor_integral(tr, &prof).unwrap();
        assert!(si.warning.is_none());
        for (a, b) in si.values.iter().zip(&run.record.s) {
            assert!((a - b).abs() < 1e-5);
        }
        let trap = cumulative_trapezoid(&tr.times, &run.record.a_slash);
        for (a, b) in trap.iter().zip(&run.record.s) {
            assert!((a + run.record.s[0] - b).abs() < 1e-5);
        }
        let ds = derivative(&tr.times, &run.record.s, 1, 5);
        let worst = ds
            .iter()
            .zip(&run.record.a_slash)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn adiabatic_step_leaves_almost_no_squeezing() {
        let p = TanhParams::from_frequencies(10.0, 1.0, 3.0, 4.0).unwrap();
        let prof = FrequencyProfile::Tanh(p);
        // The integrand cancels to ~1e-11, so the mode itself must be tighter.
        let tight = ModeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..ModeOptions::default()
        };
        let run = run_tanh(&p, 1.0, 10.0, &tight, POINTS_PER_PERIOD).unwrap();
        let si = squeezing_factor_integral(&run.trajectory, &prof).unwrap();
        let last = *si.values.last().unwrap();
        assert!(last.abs() < 1e-10, "{last:e}");
    }

    #[test]
    fn coarse_grid_warns() {
        let p = FrequencyProfile::Tanh(fig1());
        let grid = uniform_grid(&p, -10.0, 10.0, 4).unwrap();
        let ic = positive_mode_ic(&p, -10.0, 1.0).unwrap();
        let tr = integrate_mode(&p, &ic, 10.0, &grid, &ModeOptions::default()).unwrap();
        let si = squeezing_factor_integral(&tr, &p).unwrap();
        let w = si.warning.expect("coarse grid must warn");
        assert!(w.points_per_period < MIN_POINTS_PER_PERIOD && w.estimated_error > 0.0);
    }

    #[test]
    fn theta_advances_by_pi_per_half_period_of_squeezed_state() {
        let w = 2.0;
        let p = FrequencyProfile::constant(w).unwrap();
        let ic = ModeInitialCondition::from_scale(0.0, 0.3, 0.4, 1.0, 1.0).unwrap();
        let half = PI / w;
        let grid = crate::quadrature::linspace(0.0, 3.0 * half, 3 * 400 + 1);
        let tr = integrate_mode(&p, &ic, 3.0 * half, &grid, &ModeOptions::default()).unwrap();
        let th = theta_phase(&tr).unwrap();
        assert!(th.values.windows(2).all(|v| v[1] > v[0]));
        for k in 1..=3 {
            assert!((th.values[400 * k] - PI * k as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn late_phase_rate_matches_bogoliubov_average() {
        let p = fig1();
        let run = run_tanh(&p, 1.0, 12.0, &ModeOptions::default(), 256).unwrap();
        let tr = &run.trajectory;
        let b = analytic::bogoliubov(&p).unwrap();
        let a = b.alpha.norm_sqr() + b.beta.norm_sqr();
        let bb = 2.0 * b.alpha.norm() * b.beta.norm();
        let expect = tr.omega_i / (a * a - bb * bb).sqrt();
        let rate: Vec<f64> = tr.g_minus.iter().map(|g| tr.omega_i / g).collect();
        let avg = trailing_average(&tr.times, &rate, PI / p.omega_plus()).unwrap();
        assert!((avg / expect - 1.0).abs() < 1e-3, "{avg} vs {expect}");
    }

    #[test]
    fn ermakov_equation_holds_on_grid() {
        let p = fig1();
        let prof = FrequencyProfile::Tanh(p);
        let run = run_tanh(&p, 1.0, 8.0, &ModeOptions::default(), POINTS_PER_PERIOD).unwrap();
        let r = ermakov_residual(&run.trajectory, &prof).unwrap();
        assert!(r < 1e-4, "{r}");
    }

    #[test]
    fn exchange_symmetry_of_terminal_value() {
        // Closed-form sanity: the unsymmetric factor between the two orderings.
        let p = TanhParams::from_frequencies(10.0, 1.0, 3.0, 1.0).unwrap();
        let o = ModeOptions::default();
        let a = run_tanh(&p, 1.0, 12.0, &o, POINTS_PER_PERIOD).unwrap().terminal_s;
        let b = run_tanh(&p.exchanged(), 1.0, 12.0, &o, POINTS_PER_PERIOD)
            .unwrap()
            .terminal_s;
        let tc = analytic::terminal_sfactor(&p);
        let te = analytic::terminal_sfactor(&p.exchanged());
        assert!((a / tc.beta_form - 1.0).abs() < 1e-6);
        assert!((b / te.beta_form - 1.0).abs() < 1e-6);
    }

    #[test]
    fn invariant_coefficient_examples() {
        let c = invariant_coeffs(1.0, 0.0, 2.0).unwrap();
        assert_eq!((c.g_plus, c.g_zero), (4.0, 0.0));
        let c = invariant_coeffs(2.0, 2.0 * 1.5, 1.5).unwrap();
        assert!((c.g_zero + 1.5).abs() < 1e-15 && (c.g_plus - 2.25).abs() < 1e-15);
        assert!((c.invariant_frequency() - 1.5).abs() < 1e-15);
        assert!(invariant_coeffs(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn squeezing_and_nonadiabaticity_basics() {
        assert_eq!(squeezing_factor(1.0, 0.0, 1.3, 1.3).unwrap(), 0.0);
        assert!(squeezing_factor(0.0, 0.0, 1.0, 1.0).is_err());
        assert_eq!(nonadiabaticity(0.5, 4.0, 3.0, 1.0).unwrap(), 0.0);
        assert!(nonadiabaticity(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn trailing_average_of_sine() {
        let t = crate::quadrature::linspace(0.0, 10.0, 2001);
        let f: Vec<f64> = t.iter().map(|x| 1.0 + (2.0 * PI * x).sin()).collect();
        assert!((trailing_average(&t, &f, 3.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(trailing_average(&t, &f, 20.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn squeezing_factor_nonnegative(g in 1e-3..1e3f64, dg in -1e3..1e3f64,
                                        w in 1e-3..1e3f64, wi in 1e-3..1e3f64) {
            prop_assert!(squeezing_factor(g, dg, w, wi).unwrap() >= 0.0);
        }

        #[test]
        fn invariant_frequency_is_recovered(g in 1e-3..1e3f64, dg in -1e2..1e2f64, wi in 1e-2..1e2f64) {
            let c = invariant_coeffs(g, dg, wi).unwrap();
            prop_assert!((c.invariant_frequency() / wi - 1.0).abs() < 1e-10);
        }
    }
}
