//! Scenario files: strict TOML, unknown keys rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use elr_core::dynamics::{ModeOptions, POINTS_PER_PERIOD};
use elr_core::profiles::{FrequencyProfile, Interpolation, Table, TanhParams};
use elr_core::thermo::eps_from_entropy;
use serde::Deserialize;

/// Marks failures caused by the user's input rather than the numerics.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    profile: RawProfile,
    mass: Option<f64>,
    n_trunc: Option<f64>,
    t_span: Option<[f64; 2]>,
    points_per_period: Option<usize>,
    integrator: Option<RawIntegrator>,
    thermal: RawThermal,
    outputs: Option<Vec<Output>>,
    format: Option<Format>,
    output_dir: Option<PathBuf>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawProfile {
    Constant {
        omega: f64,
    },
    Tanh {
        omega0: f64,
        d: f64,
        omega_minus: Option<f64>,
        omega_plus: Option<f64>,
        eps_minus: Option<f64>,
        eps_plus: Option<f64>,
    },
    Table {
        path: PathBuf,
        interpolation: Option<InterpolationKind>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InterpolationKind {
    Linear,
    Cubic,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    rtol: Option<f64>,
    atol: Option<f64>,
    max_steps: Option<usize>,
    drift_limit: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    epsilon: Option<f64>,
    #[serde(rename = "T0")]
    t0: Option<f64>,
    #[serde(rename = "S_ent")]
    s_ent: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axes: Vec<RawAxis>,
    jobs: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: AxisParam,
    min: f64,
    max: f64,
    count: usize,
    spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Trajectory,
    Squeeze,
    Thermo,
    Summary,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    /// `ω₊/ω₋` with `ω₋` held fixed.
    Ratio,
    /// `ω₋ d`.
    OmegaMinusD,
    /// `ω₀/ω₋`.
    Omega0Ratio,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::Ratio => "ratio",
            AxisParam::OmegaMinusD => "omega_minus_d",
            AxisParam::Omega0Ratio => "omega0_ratio",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Initial thermal state, resolved to `ε = ω_I/T₀` once `ω_I` is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thermal {
    Epsilon(f64),
    InitialTemperature(f64),
    Entropy(f64),
}

impl Thermal {
    pub fn epsilon(self, omega_i: f64) -> anyhow::Result<f64> {
        match self {
            Thermal::Epsilon(e) => Ok(e),
            Thermal::InitialTemperature(t0) => Ok(omega_i / t0),
            Thermal::Entropy(s) => eps_from_entropy(s).map_err(|e| config_err(format!("thermal.S_ent: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Span {
    Truncation(f64),
    Explicit(f64, f64),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub profile: FrequencyProfile,
    pub mass: f64,
    pub span: Span,
    pub options: ModeOptions,
    pub points_per_period: usize,
    pub thermal: Thermal,
    pub outputs: Vec<Output>,
    pub format: Format,
    pub output_dir: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
}

impl Scenario {
    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// `[t0, t1]` of the run.
    pub fn time_span(&self) -> anyhow::Result<(f64, f64)> {
        match (self.span, &self.profile) {
            (Span::Explicit(a, b), _) => Ok((a, b)),
            (Span::Truncation(n), FrequencyProfile::Tanh(p)) => Ok(elr_core::dynamics::tanh_span(p, n)),
            (Span::Truncation(_), FrequencyProfile::Tabulated(t)) => {
                t.span().ok_or_else(|| config_err("profile.path: empty table"))
            }
            (Span::Truncation(_), FrequencyProfile::Constant { .. }) => {
                Err(config_err("t_span: required for a constant profile"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => elr_core::quadrature::linspace(self.min, self.max, self.count),
            Spacing::Log => elr_core::quadrature::linspace(self.min.ln(), self.max.ln(), self.count)
                .into_iter()
                .map(f64::exp)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub jobs: Option<usize>,
}

pub fn load(path: &Path) -> anyhow::Result<Scenario> {
    let text =
        std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse(&text, base)
}

/// Parses a scenario; relative table paths resolve against `base`.
pub fn parse(text: &str, base: &Path) -> anyhow::Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| config_err(format!("config: {e}")))?;
    resolve(raw, base)
}

fn positive(key: &str, v: f64) -> anyhow::Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(config_err(format!("{key}: must be positive, got {v}")))
    }
}

fn resolve(raw: RawScenario, base: &Path) -> anyhow::Result<Scenario> {
    let profile = resolve_profile(raw.profile, base)?;
    let mass = positive("mass", raw.mass.unwrap_or(1.0))?;

    let span = match (raw.t_span, raw.n_trunc) {
        (Some(_), Some(_)) => return Err(config_err("t_span: give either t_span or n_trunc, not both")),
        (Some([a, b]), None) => {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(config_err(format!("t_span: need t0 < t1, got [{a}, {b}]")));
            }
            Span::Explicit(a, b)
        }
        (None, n) => {
            let n = n.unwrap_or(8.0);
            if !matches!(profile, FrequencyProfile::Tanh(_)) && raw.n_trunc.is_some() {
                return Err(config_err("n_trunc: only meaningful for a tanh profile"));
            }
            Span::Truncation(positive("n_trunc", n)?)
        }
    };

    let mut options = ModeOptions::default();
    if let Some(i) = raw.integrator {
        if let Some(v) = i.rtol {
            options.rtol = positive("integrator.rtol", v)?;
        }
        if let Some(v) = i.atol {
            options.atol = positive("integrator.atol", v)?;
        }
        if let Some(v) = i.max_steps {
            if v == 0 {
                return Err(config_err("integrator.max_steps: must be positive"));
            }
            options.max_steps = v;
        }
        if let Some(v) = i.drift_limit {
            options.drift_limit = Some(positive("integrator.drift_limit", v)?);
        }
    }

    let points_per_period = raw.points_per_period.unwrap_or(POINTS_PER_PERIOD);
    if points_per_period < 2 {
        return Err(config_err("points_per_period: must be at least 2"));
    }

    let th = raw.thermal;
    let thermal = match (th.epsilon, th.t0, th.s_ent) {
        (Some(e), None, None) => Thermal::Epsilon(positive("thermal.epsilon", e)?),
        (None, Some(t), None) => Thermal::InitialTemperature(positive("thermal.T0", t)?),
        (None, None, Some(s)) => Thermal::Entropy(positive("thermal.S_ent", s)?),
        _ => return Err(config_err("thermal: give exactly one of epsilon, T0, S_ent")),
    };

    let outputs = raw.outputs.unwrap_or_else(|| {
        vec![
            Output::Trajectory,
            Output::Squeeze,
            Output::Thermo,
            Output::Summary,
            Output::Plot,
        ]
    });

    let sweep = raw.sweep.map(resolve_sweep).transpose()?;
    if sweep.is_some() && !matches!(profile, FrequencyProfile::Tanh(_)) {
        return Err(config_err("sweep: requires a tanh profile"));
    }

    Ok(Scenario {
        profile,
        mass,
        span,
        options,
        points_per_period,
        thermal,
        outputs,
        format: raw.format.unwrap_or_default(),
        output_dir: raw.output_dir,
        sweep,
    })
}

fn resolve_profile(raw: RawProfile, base: &Path) -> anyhow::Result<FrequencyProfile> {
    let core = |e: elr_core::Error| config_err(format!("profile: {e}"));
    match raw {
        RawProfile::Constant { omega } => FrequencyProfile::constant(omega).map_err(core),
        RawProfile::Tanh {
            omega0,
            d,
            omega_minus,
            omega_plus,
            eps_minus,
            eps_plus,
        } => {
            let p = match (omega_minus, omega_plus, eps_minus, eps_plus) {
                (Some(wm), Some(wp), None, None) => TanhParams::from_frequencies(omega0, wm, wp, d),
                (None, None, Some(em), Some(ep)) => TanhParams::new(omega0, em, ep, d),
                _ => {
                    return Err(config_err(
                        "profile: give either omega_minus and omega_plus, or eps_minus and eps_plus",
                    ))
                }
            };
            Ok(FrequencyProfile::Tanh(p.map_err(core)?))
        }
        RawProfile::Table { path, interpolation } => {
            let path = if path.is_absolute() { path } else { base.join(path) };
            let [t, w2] =
                read_columns(&path, ["t", "omega2"]).map_err(|e| config_err(format!("profile.path: {e:#}")))?;
            let interp = match interpolation {
                Some(InterpolationKind::Linear) => Interpolation::Linear,
                _ => Interpolation::Cubic,
            };
            Ok(FrequencyProfile::Tabulated(Table::new(t, w2, interp).map_err(core)?))
        }
    }
}

fn resolve_sweep(raw: RawSweep) -> anyhow::Result<SweepSpec> {
    if raw.axes.is_empty() || raw.axes.len() > 2 {
        return Err(config_err(format!(
            "sweep.axes: need one or two axes, got {}",
            raw.axes.len()
        )));
    }
    let mut axes = Vec::new();
    for a in raw.axes {
        let key = a.param.name();
        if a.count < 2 {
            return Err(config_err(format!(
                "sweep.axes.count: {key} needs count >= 2, got {}",
                a.count
            )));
        }
        if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
            return Err(config_err(format!("sweep.axes.min: {key} needs min < max")));
        }
        let spacing = a.spacing.unwrap_or_default();
        if spacing == Spacing::Log && a.min <= 0.0 {
            return Err(config_err(format!(
                "sweep.axes.min: {key} needs min > 0 for log spacing"
            )));
        }
        axes.push(Axis {
            param: a.param,
            min: a.min,
            max: a.max,
            count: a.count,
            spacing,
        });
    }
    if axes.len() == 2 && axes[0].param == axes[1].param {
        return Err(config_err("sweep.axes.param: the two axes must differ"));
    }
    if raw.jobs == Some(0) {
        return Err(config_err("sweep.jobs: must be positive"));
    }
    Ok(SweepSpec { axes, jobs: raw.jobs })
}

/// Reads the named numeric columns of a headed CSV file.
pub fn read_columns<const K: usize>(path: &Path, names: [&str; K]) -> anyhow::Result<[Vec<f64>; K]> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let headers = reader.headers()?.clone();
    let mut idx = [0usize; K];
    for (k, name) in names.iter().enumerate() {
        idx[k] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| anyhow::anyhow!("{}: missing column `{name}`", path.display()))?;
    }
    let mut cols: [Vec<f64>; K] = std::array::from_fn(|_| Vec::new());
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        for k in 0..K {
            let cell = rec.get(idx[k]).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| {
                anyhow::anyhow!(
                    "{}: row {}: `{}` is not a number in column `{}`",
                    path.display(),
                    row + 2,
                    cell,
                    names[k]
                )
            })?;
            cols[k].push(v);
        }
    }
    Ok(cols)
}
