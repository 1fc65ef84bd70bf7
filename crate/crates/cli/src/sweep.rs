use std::path::Path;

use anyhow::{Context, Result};
use elr_core::dynamics::run_tanh;
use elr_core::export::format_f64;
use elr_core::profiles::{FrequencyProfile, TanhParams};
use rayon::prelude::*;

use crate::config::{config_err, AxisParam, Scenario, Span, SweepSpec};
use crate::plot::{line_plot, Series};

pub const HEADER: [&str; 5] = ["axis1", "axis2", "terminal_S", "log10_terminal_S", "reason"];

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub axis1: f64,
    pub axis2: f64,
    pub terminal_s: f64,
    pub reason: String,
}

fn apply(p: &TanhParams, assignments: &[(AxisParam, f64)]) -> elr_core::Result<TanhParams> {
    let wm = p.omega_minus();
    let (mut w0, mut wp, mut d) = (p.omega0(), p.omega_plus(), p.d());
    for &(param, v) in assignments {
        match param {
            AxisParam::Ratio => wp = v * wm,
            AxisParam::OmegaMinusD => d = v / wm,
            AxisParam::Omega0Ratio => w0 = v * wm,
        }
    }
    TanhParams::from_frequencies(w0, wm, wp, d)
}

/// Evaluates the grid in row-major order (first axis outer). Failed cells
/// carry NaN and the error text.
pub fn evaluate(s: &Scenario, spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<Cell>> {
    let FrequencyProfile::Tanh(base) = s.profile else {
        return Err(config_err("sweep: requires a tanh profile"));
    };
    let Span::Truncation(n_trunc) = s.span else {
        return Err(config_err("t_span: sweeps use n_trunc, not t_span"));
    };
    let a1 = spec.axes[0].values();
    let a2 = spec.axes.get(1).map(|a| a.values());
    let mut points = Vec::new();
    for &x in &a1 {
        match &a2 {
            Some(ys) => points.extend(ys.iter().map(|&y| (x, y))),
            None => points.push((x, f64::NAN)),
        }
    }

    let cell = |&(x, y): &(f64, f64)| {
        let mut assign = vec![(spec.axes[0].param, x)];
        if let Some(ax) = spec.axes.get(1) {
            assign.push((ax.param, y));
        }
        let outcome =
            apply(&base, &assign).and_then(|p| run_tanh(&p, s.mass, n_trunc, &s.options, s.points_per_period));
        match outcome {
            Ok(r) => Cell {
                axis1: x,
                axis2: y,
                terminal_s: r.terminal_s,
                reason: String::new(),
            },
            Err(e) => Cell {
                axis1: x,
                axis2: y,
                terminal_s: f64::NAN,
                reason: e.to_string(),
            },
        }
    };

    let threads = jobs.or(spec.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot start worker threads")?;
    Ok(pool.install(|| points.par_iter().map(cell).collect()))
}

pub fn write(dir: &Path, spec: &SweepSpec, cells: &[Cell]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(HEADER)?;
    for c in cells {
        w.write_record([
            format_f64(c.axis1),
            format_f64(c.axis2),
            format_f64(c.terminal_s),
            format_f64(c.terminal_s.log10()),
            c.reason.clone(),
        ])?;
    }
    w.flush()?;

    // one curve of log10 S against the first axis per value of the second
    let a1 = spec.axes[0].values();
    let groups = cells.len() / a1.len();
    let logs: Vec<Vec<f64>> = (0..groups)
        .map(|g| {
            (0..a1.len())
                .map(|i| cells[i * groups + g].terminal_s.log10())
                .collect()
        })
        .collect();
    let series: Vec<Series> = logs
        .iter()
        .enumerate()
        .map(|(g, y)| Series {
            label: match spec.axes.get(1) {
                Some(ax) => format!("{} = {:.4}", ax.param.name(), cells[g].axis2),
                None => "log10 S".to_string(),
            },
            x: &a1,
            y,
        })
        .collect();
    let svg = line_plot("log10 terminal S", spec.axes[0].param.name(), &series);
    std::fs::write(dir.join("sweep.svg"), svg)?;
    Ok(())
}
