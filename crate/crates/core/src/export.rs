//! CSV export of trajectories.
//!
//! Numbers are written with 17 significant digits so every value reads back
//! to the same double.

use std::io::{self, Write};

use crate::dynamics::{ModeTrajectory, SqueezeRecord};
use crate::thermo::{squeezing_parameter, ThermalState};

pub const TRAJECTORY_COLUMNS: [&str; 10] = [
    "t", "re_g", "im_g", "re_gdot", "im_gdot", "g_minus", "dg_minus", "S", "A_slash", "theta",
];

pub const THERMO_COLUMNS: [&str; 8] = ["omega_eff", "epsilon", "S_ent", "E", "T", "F_omega", "r", "Q"];

pub const SCHEDULE_COLUMNS: [&str; 3] = ["t", "Omega", "Omega_prime"];

/// Round-trip representation of a double.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_row<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let line: Vec<String> = values.iter().map(|&v| format_f64(v)).collect();
    writeln!(out, "{}", line.join(","))
}

/// Writes one row per sample. With `epsilon` set, the thermodynamic
/// columns of the invariant thermal state are appended.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    traj: &ModeTrajectory,
    record: &SqueezeRecord,
    theta: &[f64],
    epsilon: Option<f64>,
) -> io::Result<()> {
    let mut header: Vec<&str> = TRAJECTORY_COLUMNS.to_vec();
    if epsilon.is_some() {
        header.extend(THERMO_COLUMNS);
    }
    writeln!(out, "{}", header.join(","))?;
    for k in 0..traj.len() {
        let mut row = vec![
            traj.times[k],
            traj.g[k].re,
            traj.g[k].im,
            traj.gdot[k].re,
            traj.gdot[k].im,
            traj.g_minus[k],
            traj.dg_minus[k],
            record.s[k],
            record.a_slash[k],
            theta.get(k).copied().unwrap_or(f64::NAN),
        ];
        if let Some(eps) = epsilon {
            row.extend(thermo_row(record.omega[k], traj.omega_i, record.s[k], eps));
        }
        write_row(out, &row)?;
    }
    Ok(())
}

/// `omega_eff, epsilon, S_ent, E, T, F_omega, r, Q` at one sample; NaN when
/// the state is undefined.
pub fn thermo_row(omega: f64, omega_i: f64, s: f64, eps: f64) -> [f64; 8] {
    match ThermalState::from_squeezing(omega, omega_i, s.max(0.0), eps) {
        Ok(st) => [
            st.omega_eff(),
            eps,
            st.entropy(),
            st.energy(),
            st.temperature(),
            st.force(),
            squeezing_parameter(s.max(0.0), omega, omega_i).unwrap_or(f64::NAN),
            st.husimi_q(),
        ],
        Err(_) => [f64::NAN; 8],
    }
}

/// `t, Omega, Omega_prime` rows, the input format of the reconstruction.
pub fn write_schedule_csv<W: Write>(
    out: &mut W,
    times: &[f64],
    big_omega: &[f64],
    omega_prime: &[f64],
) -> io::Result<()> {
    writeln!(out, "{}", SCHEDULE_COLUMNS.join(","))?;
    for k in 0..times.len() {
        write_row(out, &[times[k], big_omega[k], omega_prime[k]])?;
    }
    Ok(())
}

/// Generic numeric table with a header line.
pub fn write_table<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        write_row(out, r)?;
    }
    Ok(())
}
