use std::path::Path;

use anyhow::{Context, Result};
use elr_core::export::write_table;
use elr_core::thermo::{reconstruct_from_omega_prime, Reconstruction};

use crate::config::{config_err, read_columns, Scenario};
use crate::plot::{line_plot, Series};

pub const HEADER: [&str; 7] = ["t", "omega", "Omega", "g_minus", "dg_minus", "T", "T_over_T0"];

pub struct Outcome {
    pub reconstruction: Reconstruction,
    pub temperature: Vec<f64>,
    pub t0: f64,
}

/// `ω_I` is the scenario's frequency at the first schedule time.
pub fn run(s: &Scenario, schedule: &Path) -> Result<Outcome> {
    let [t, big, prime] = read_columns(schedule, ["t", "Omega", "Omega_prime"])
        .map_err(|e| config_err(format!("omega schedule: {e:#}")))?;
    let first = *t.first().ok_or_else(|| config_err("omega schedule: no rows"))?;
    let omega_i = s
        .profile
        .omega(first)
        .map_err(|e| config_err(format!("profile at schedule start: {e}")))?;
    let rec = reconstruct_from_omega_prime(&t, &big, &prime, omega_i, omega_i)?;
    let eps = s.thermal.epsilon(omega_i)?;
    let temperature = rec.temperature(eps)?;
    Ok(Outcome {
        reconstruction: rec,
        temperature,
        t0: omega_i / eps,
    })
}

pub fn write(dir: &Path, o: &Outcome) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let r = &o.reconstruction;
    let rows: Vec<Vec<f64>> = (0..r.times.len())
        .map(|k| {
            vec![
                r.times[k],
                r.omega[k],
                r.big_omega[k],
                r.g_minus[k],
                r.dg_minus[k],
                o.temperature[k],
                o.temperature[k] / o.t0,
            ]
        })
        .collect();
    let path = dir.join("reconstruction.csv");
    let mut w = std::io::BufWriter::new(
        std::fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?,
    );
    write_table(&mut w, &HEADER, &rows)?;

    let x: Vec<f64> = r.times.iter().map(|t| r.omega_i * t).collect();
    let w_ratio: Vec<f64> = r.omega.iter().map(|w| w / r.omega_i).collect();
    let t_ratio: Vec<f64> = o.temperature.iter().map(|t| t / o.t0).collect();
    let svg = line_plot(
        "reconstructed frequency and temperature",
        "omega_I t",
        &[
            Series {
                label: "omega/omega_I".into(),
                x: &x,
                y: &w_ratio,
            },
            Series {
                label: "T/T0".into(),
                x: &x,
                y: &t_ratio,
            },
        ],
    );
    std::fs::write(dir.join("reconstruction.svg"), svg)?;
    Ok(())
}
