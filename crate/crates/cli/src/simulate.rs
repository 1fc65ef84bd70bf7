use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use elr_core::analytic::terminal_sfactor;
use elr_core::dynamics::{
    integrate_mode, late_window, positive_mode_ic, squeeze_record, theta_phase, trailing_average, uniform_grid,
    wronskian_drift, ModeTrajectory, SqueezeRecord,
};
use elr_core::export::{
    format_f64, thermo_row, write_schedule_csv, write_trajectory_csv, THERMO_COLUMNS, TRAJECTORY_COLUMNS,
};
use elr_core::profiles::FrequencyProfile;
use elr_core::thermo::entropy_from_eps;
use serde_json::{json, Map, Value};

use crate::config::{Format, Output, Scenario};
use crate::plot::{line_plot, Series};

pub struct Simulation {
    pub trajectory: ModeTrajectory,
    pub record: SqueezeRecord,
    pub theta: Vec<f64>,
    pub epsilon: f64,
    pub terminal_s: f64,
    pub terminal_t: f64,
    pub drift: f64,
    pub warnings: Vec<String>,
}

/// Averaging window for terminal values: four periods `π/ω` at the end.
fn terminal_window(profile: &FrequencyProfile, t0: f64, t1: f64) -> Result<f64> {
    let w = match profile {
        FrequencyProfile::Tanh(p) => late_window(p),
        _ => 4.0 * PI / profile.omega(t1)?,
    };
    Ok(w.min(t1 - t0))
}

pub fn run(s: &Scenario) -> Result<Simulation> {
    let (t0, t1) = s.time_span()?;
    let grid = uniform_grid(&s.profile, t0, t1, s.points_per_period)?;
    let ic = positive_mode_ic(&s.profile, t0, s.mass)?;
    let trajectory = integrate_mode(&s.profile, &ic, t1, &grid, &s.options)?;
    let record = squeeze_record(&trajectory, &s.profile)?;
    let theta = theta_phase(&trajectory)?;
    let epsilon = s.thermal.epsilon(trajectory.omega_i)?;

    let window = terminal_window(&s.profile, t0, t1)?;
    let terminal_s = trailing_average(&record.times, &record.s, window)?;
    let temps: Vec<f64> = record
        .omega
        .iter()
        .zip(&record.big_omega)
        .map(|(w, o)| (w + o) / epsilon)
        .collect();
    let terminal_t = trailing_average(&record.times, &temps, window)?;

    let mut warnings = Vec::new();
    if let Some(c) = theta.warning {
        warnings.push(format!(
            "output grid is coarse ({:.1} points per period), phase error estimate {:.2e}",
            c.points_per_period, c.estimated_error
        ));
    }
    Ok(Simulation {
        drift: wronskian_drift(&trajectory),
        trajectory,
        record,
        theta: theta.values,
        epsilon,
        terminal_s,
        terminal_t,
        warnings,
    })
}

pub fn summary(s: &Scenario, sim: &Simulation) -> Value {
    let tr = &sim.trajectory;
    let wi = tr.omega_i;
    let mut m = Map::new();
    let kind = match s.profile {
        FrequencyProfile::Constant { .. } => "constant",
        FrequencyProfile::Tanh(_) => "tanh",
        FrequencyProfile::Tabulated(_) => "table",
    };
    m.insert("profile".into(), json!(kind));
    m.insert("mass".into(), json!(tr.mass));
    m.insert("t_start".into(), json!(tr.times.first()));
    m.insert("t_end".into(), json!(tr.times.last()));
    m.insert("samples".into(), json!(tr.len()));
    m.insert("omega_I".into(), json!(wi));
    m.insert("epsilon".into(), json!(sim.epsilon));
    m.insert("T0".into(), json!(wi / sim.epsilon));
    m.insert("S_ent".into(), json!(entropy_from_eps(sim.epsilon).ok()));
    m.insert("terminal_S".into(), json!(sim.terminal_s));
    m.insert("terminal_T".into(), json!(sim.terminal_t));
    m.insert("terminal_T_over_T0".into(), json!(sim.terminal_t * sim.epsilon / wi));
    m.insert("wronskian_drift".into(), json!(sim.drift));
    m.insert(
        "integrator".into(),
        json!({
            "rtol": s.options.rtol,
            "atol": s.options.atol,
            "accepted_steps": tr.stats.accepted,
            "rejected_steps": tr.stats.rejected,
            "evaluations": tr.stats.evaluations,
        }),
    );
    if let FrequencyProfile::Tanh(p) = &s.profile {
        let tc = terminal_sfactor(p);
        m.insert(
            "analytic".into(),
            json!({ "eq_Sfactor": tc.beta_form, "eq_E_infty": tc.hyperbolic_form }),
        );
    }
    m.insert("warnings".into(), json!(sim.warnings));
    Value::Object(m)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes the requested artifacts; returns their file names.
pub fn write_outputs(s: &Scenario, sim: &Simulation, dir: &Path, format: Format) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let tr = &sim.trajectory;
    let eps = s.wants(Output::Thermo).then_some(sim.epsilon);
    let mut written = Vec::new();

    if s.wants(Output::Trajectory) {
        match format {
            Format::Csv => {
                let mut w = create(dir, "trajectory.csv")?;
                write_trajectory_csv(&mut w, tr, &sim.record, &sim.theta, eps)?;
                w.flush()?;
                written.push("trajectory.csv".to_string());
            }
            Format::Json => {
                let mut w = create(dir, "trajectory.json")?;
                serde_json::to_writer(&mut w, &trajectory_json(sim, eps))?;
                w.flush()?;
                written.push("trajectory.json".to_string());
            }
        }
    }
    if s.wants(Output::Squeeze) {
        let prime: Vec<f64> = (0..tr.len())
            .map(|k| sim.record.omega[k] * tr.g_minus[k] / tr.omega_i - 1.0)
            .collect();
        let mut w = create(dir, "omega_schedule.csv")?;
        write_schedule_csv(&mut w, &tr.times, &sim.record.big_omega, &prime)?;
        w.flush()?;
        written.push("omega_schedule.csv".to_string());
    }
    if s.wants(Output::Summary) {
        let mut w = create(dir, "summary.json")?;
        serde_json::to_writer_pretty(&mut w, &summary(s, sim))?;
        writeln!(w)?;
        w.flush()?;
        written.push("summary.json".to_string());
    }
    if s.wants(Output::Plot) {
        let inv: Vec<f64> = tr.g_minus.iter().map(|g| 1.0 / g).collect();
        let svg = line_plot(
            "mode scale and squeezing factor",
            "t",
            &[
                Series {
                    label: "1/g_minus".into(),
                    x: &tr.times,
                    y: &inv,
                },
                Series {
                    label: "S".into(),
                    x: &tr.times,
                    y: &sim.record.s,
                },
            ],
        );
        std::fs::write(dir.join("trajectory.svg"), svg)?;
        written.push("trajectory.svg".to_string());
    }
    Ok(written)
}

fn trajectory_json(sim: &Simulation, eps: Option<f64>) -> Value {
    let tr = &sim.trajectory;
    let n = tr.len();
    let mut cols: Vec<Vec<f64>> = vec![
        tr.times.clone(),
        tr.g.iter().map(|g| g.re).collect(),
        tr.g.iter().map(|g| g.im).collect(),
        tr.gdot.iter().map(|g| g.re).collect(),
        tr.gdot.iter().map(|g| g.im).collect(),
        tr.g_minus.clone(),
        tr.dg_minus.clone(),
        sim.record.s.clone(),
        sim.record.a_slash.clone(),
        sim.theta.clone(),
    ];
    let mut names: Vec<&str> = TRAJECTORY_COLUMNS.to_vec();
    if let Some(e) = eps {
        names.extend(THERMO_COLUMNS);
        let mut thermo = vec![Vec::with_capacity(n); THERMO_COLUMNS.len()];
        for k in 0..n {
            let row = thermo_row(sim.record.omega[k], tr.omega_i, sim.record.s[k], e);
            for (c, v) in thermo.iter_mut().zip(row) {
                c.push(v);
            }
        }
        cols.extend(thermo);
    }
    let mut m = Map::new();
    for (name, col) in names.iter().zip(cols) {
        // JSON has no NaN or infinity; those go out as strings.
        let vals: Vec<Value> = col
            .iter()
            .map(|v| if v.is_finite() { json!(v) } else { json!(format_f64(*v)) })
            .collect();
        m.insert((*name).to_string(), Value::Array(vals));
    }
    Value::Object(m)
}
