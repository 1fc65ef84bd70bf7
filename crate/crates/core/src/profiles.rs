//! Frequency-modulation models `ω²(t)`.

use crate::{Error, Result};

/// Parameters of the exactly solvable profile
/// `ω²(t) = ω₀² − ε(t)²`, `ε(t) = ε₋(1 − tanh t/d)/2 + ε₊(1 + tanh t/d)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhParams {
    omega0: f64,
    eps_minus: f64,
    eps_plus: f64,
    d: f64,
}

impl TanhParams {
    pub fn new(omega0: f64, eps_minus: f64, eps_plus: f64, d: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::invalid("omega0", format!("must be positive, got {omega0}")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::invalid("d", format!("must be positive, got {d}")));
        }
        for (name, eps) in [("eps_minus", eps_minus), ("eps_plus", eps_plus)] {
            if !(eps.is_finite() && (0.0..omega0).contains(&eps)) {
                return Err(Error::invalid(
                    name,
                    format!("must satisfy 0 ≤ ε < ω₀ = {omega0}, got {eps}"),
                ));
            }
        }
        Ok(Self {
            omega0,
            eps_minus,
            eps_plus,
            d,
        })
    }

    /// Builds the profile from its asymptotic frequencies, taking `ε± ≥ 0`.
    pub fn from_frequencies(omega0: f64, omega_minus: f64, omega_plus: f64, d: f64) -> Result<Self> {
        for (name, w) in [("omega_minus", omega_minus), ("omega_plus", omega_plus)] {
            if !(w.is_finite() && w > 0.0 && w <= omega0) {
                return Err(Error::invalid(
                    name,
                    format!("must satisfy 0 < ω ≤ ω₀ = {omega0}, got {w}"),
                ));
            }
        }
        let eps = |w: f64| ((omega0 - w) * (omega0 + w)).max(0.0).sqrt();
        Self::new(omega0, eps(omega_minus), eps(omega_plus), d)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn eps_minus(&self) -> f64 {
        self.eps_minus
    }

    pub fn eps_plus(&self) -> f64 {
        self.eps_plus
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Early-time frequency `ω₋ = √(ω₀² − ε₋²)`.
    pub fn omega_minus(&self) -> f64 {
        ((self.omega0 - self.eps_minus) * (self.omega0 + self.eps_minus)).sqrt()
    }

    /// Late-time frequency `ω₊ = √(ω₀² − ε₊²)`.
    pub fn omega_plus(&self) -> f64 {
        ((self.omega0 - self.eps_plus) * (self.omega0 + self.eps_plus)).sqrt()
    }

    /// Same profile with the two ends exchanged (`ε₋ ↔ ε₊`).
    pub fn exchanged(&self) -> Self {
        Self {
            eps_minus: self.eps_plus,
            eps_plus: self.eps_minus,
            ..*self
        }
    }

    /// `ε(t)`, written with logistic weights so neither tail loses digits.
    pub fn epsilon(&self, t: f64) -> f64 {
        let s = t / self.d;
        let w_minus = logistic(-2.0 * s);
        let w_plus = logistic(2.0 * s);
        self.eps_minus * w_minus + self.eps_plus * w_plus
    }

    fn depsilon_dt(&self, t: f64) -> f64 {
        (self.eps_plus - self.eps_minus) / (2.0 * self.d) * sech2(t / self.d)
    }
}

/// `1 / (1 + e^{-x})`.
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    Linear,
    #[default]
    Cubic,
}

/// Sampled `(t, ω²)` data with a linear or natural-cubic interpolant.
///
/// A table built through [`Table::unchecked`] may violate the sample
/// invariants; [`validate`] reports those and evaluation refuses them.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    times: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
    // second derivatives of the natural spline at the knots
    curvature: Vec<f64>,
}

impl Table {
    pub fn new(times: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if let Some(v) = sample_violations(&times, &values).into_iter().next() {
            return Err(Error::invalid("table", v.to_string()));
        }
        Ok(Self::unchecked(times, values, interpolation))
    }

    pub fn unchecked(times: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Self {
        let curvature = if interpolation == Interpolation::Cubic && sample_violations(&times, &values).is_empty() {
            natural_spline_curvature(&times, &values)
        } else {
            vec![0.0; values.len()]
        };
        Self {
            times,
            values,
            interpolation,
            curvature,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.times.first()?, *self.times.last()?))
    }

    fn locate(&self, t: f64) -> Result<usize> {
        if !sample_violations(&self.times, &self.values).is_empty() {
            return Err(Error::invalid("table", "tabulated profile failed validation"));
        }
        let (start, end) = self.span().expect("validated table is non-empty");
        if !(start..=end).contains(&t) {
            return Err(Error::OutOfDomain { t, start, end });
        }
        let idx = self.times.partition_point(|&x| x <= t);
        Ok(idx.clamp(1, self.times.len() - 1) - 1)
    }

    fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let i = self.locate(t)?;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        match self.interpolation {
            Interpolation::Linear => Ok((a * y0 + b * y1, (y1 - y0) / h)),
            Interpolation::Cubic => {
                let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
                let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
                let slope = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
                Ok((value, slope))
            }
        }
    }
}

fn natural_spline_curvature(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior knots.
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = t[i] - t[i - 1];
        let h1 = t[i + 1] - t[i];
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        if i > 1 {
            let w = h0 / diag[i - 1];
            diag[i] -= w * h0;
            rhs[i] -= w * rhs[i - 1];
        }
    }
    for i in (1..n - 1).rev() {
        let h1 = t[i + 1] - t[i];
        m[i] = (rhs[i] - h1 * m[i + 1]) / diag[i];
    }
    m
}

/// The time-dependent `ω²(t)` driving the oscillator.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyProfile {
    Constant { omega: f64 },
    Tanh(TanhParams),
    Tabulated(Table),
}

impl FrequencyProfile {
    pub fn constant(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", format!("must be positive, got {omega}")));
        }
        Ok(Self::Constant { omega })
    }

    pub fn omega_squared(&self, t: f64) -> Result<f64> {
        let w2 = match self {
            Self::Constant { omega } => omega * omega,
            Self::Tanh(p) => {
                let eps = p.epsilon(t);
                (p.omega0 - eps) * (p.omega0 + eps)
            }
            Self::Tabulated(table) => table.eval(t)?.0,
        };
        if w2 > 0.0 {
            Ok(w2)
        } else {
            Err(Error::NonPositiveFrequency { t, value: w2 })
        }
    }

    /// `dω²/dt`: closed form for the analytic variants, interpolant slope for tables.
    pub fn domega2_dt(&self, t: f64) -> Result<f64> {
        match self {
            Self::Constant { .. } => Ok(0.0),
            Self::Tanh(p) => Ok(-2.0 * p.epsilon(t) * p.depsilon_dt(t)),
            Self::Tabulated(table) => Ok(table.eval(t)?.1),
        }
    }

    pub fn omega(&self, t: f64) -> Result<f64> {
        self.omega_squared(t).map(f64::sqrt)
    }

    /// Upper bound for `ω(t)` on `[t0, t1]`, used to size output grids.
    pub fn max_omega(&self, t0: f64, t1: f64) -> Result<f64> {
        match self {
            Self::Constant { omega } => Ok(*omega),
            Self::Tanh(p) => Ok(p.omega_minus().max(p.omega_plus())),
            Self::Tabulated(table) => {
                let mut w2max = self.omega_squared(t0)?.max(self.omega_squared(t1)?);
                for (&t, &v) in table.times.iter().zip(&table.values) {
                    if (t0..=t1).contains(&t) {
                        w2max = w2max.max(v);
                    }
                }
                // spline overshoot between knots
                if table.interpolation == Interpolation::Cubic {
                    for k in 0..=1024 {
                        let t = t0 + (t1 - t0) * k as f64 / 1024.0;
                        w2max = w2max.max(self.omega_squared(t)?);
                    }
                }
                Ok(w2max.sqrt())
            }
        }
    }

    pub fn as_tanh(&self) -> Option<&TanhParams> {
        match self {
            Self::Tanh(p) => Some(p),
            _ => None,
        }
    }
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewSamples { count: usize },
    LengthMismatch { times: usize, values: usize },
    NonIncreasingTimes { index: usize, t: f64 },
    NonFiniteSample { index: usize },
    NonPositive { t: f64, value: f64 },
    OutOfDomain { t: f64 },
    InvalidSampling { reason: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TooFewSamples { count } => write!(f, "table needs at least 2 samples, has {count}"),
            Self::LengthMismatch { times, values } => {
                write!(f, "{times} times but {values} values")
            }
            Self::NonIncreasingTimes { index, t } => {
                write!(f, "sample times not strictly increasing at index {index} (t = {t})")
            }
            Self::NonFiniteSample { index } => write!(f, "non-finite sample at index {index}"),
            Self::NonPositive { t, value } => write!(f, "ω² = {value} ≤ 0 at t = {t}"),
            Self::OutOfDomain { t } => write!(f, "t = {t} outside the tabulated domain"),
            Self::InvalidSampling { reason } => write!(f, "{reason}"),
        }
    }
}

fn sample_violations(times: &[f64], values: &[f64]) -> Vec<Violation> {
    let mut out = Vec::new();
    if times.len() != values.len() {
        out.push(Violation::LengthMismatch {
            times: times.len(),
            values: values.len(),
        });
    }
    if times.len() < 2 {
        out.push(Violation::TooFewSamples { count: times.len() });
    }
    if let Some(index) = times
        .iter()
        .zip(values)
        .position(|(t, v)| !t.is_finite() || !v.is_finite())
    {
        out.push(Violation::NonFiniteSample { index });
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        out.push(Violation::NonIncreasingTimes {
            index: i + 1,
            t: times[i + 1],
        });
    }
    out
}

/// Samples `ω²` on `n_samples` evenly spaced points of `t_span` and reports
/// every structural problem plus the first non-positive value. Empty means ok.
pub fn validate(profile: &FrequencyProfile, t_span: (f64, f64), n_samples: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    if n_samples < 2 || !(t_span.0 < t_span.1) {
        out.push(Violation::InvalidSampling {
            reason: format!("need n_samples ≥ 2 and t0 < t1, got {n_samples} on {t_span:?}"),
        });
        return out;
    }
    if let FrequencyProfile::Tabulated(table) = profile {
        out.extend(sample_violations(&table.times, &table.values));
        if !out.is_empty() {
            return out;
        }
    }
    for k in 0..n_samples {
        let t = t_span.0 + (t_span.1 - t_span.0) * k as f64 / (n_samples - 1) as f64;
        match profile.omega_squared(t) {
            Ok(_) => {}
            Err(Error::NonPositiveFrequency { t, value }) => {
                out.push(Violation::NonPositive { t, value });
                break;
            }
            Err(Error::OutOfDomain { t, .. }) => {
                out.push(Violation::OutOfDomain { t });
                break;
            }
            Err(e) => {
                out.push(Violation::InvalidSampling { reason: e.to_string() });
                break;
            }
        }
    }
    out
}
