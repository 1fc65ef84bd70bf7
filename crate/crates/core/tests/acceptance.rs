//! Acceptance checks. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --release --test acceptance -- --nocapture --test-threads=1`.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use elr_core::analytic::{bogoliubov, exact_g_minus, large_ratio_sfactor, sudden_jump_sfactor, terminal_sfactor};
use elr_core::dynamics::{
    integrate_mode, late_window, positive_mode_ic, run_tanh, trailing_average, wronskian_drift, ModeOptions, TanhRun,
    POINTS_PER_PERIOD,
};
use elr_core::profiles::{FrequencyProfile, TanhParams};
use elr_core::quadrature::linspace;
use elr_core::thermo::{
    entropy_from_eps, eps_from_entropy, first_law_residual, reconstruct_from_omega_prime, ThermalState,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Truncation multiplier: runs start at `−N d`.
const N_TRUNC: f64 = 12.0;

fn verdict(label: &str, pass: bool, detail: String) {
    println!("{} {label}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{label}: {detail}");
}

fn params(ratio: f64, omega_minus_d: f64) -> TanhParams {
    TanhParams::from_frequencies(10.0, 1.0, ratio, omega_minus_d).unwrap()
}

fn fig1() -> TanhParams {
    TanhParams::from_frequencies(5.0, 1.0, 3.0, 1.0).unwrap()
}

fn fig3() -> TanhParams {
    TanhParams::from_frequencies((9.0f64 + 1600.0).sqrt(), 1.0, 3.0, 0.3).unwrap()
}

fn large_ratio() -> TanhParams {
    TanhParams::from_frequencies((900.0f64 + 1600.0).sqrt(), 1.0, 30.0, 0.3).unwrap()
}

fn run(p: &TanhParams) -> TanhRun {
    run_tanh(p, 1.0, N_TRUNC, &ModeOptions::default(), POINTS_PER_PERIOD).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn fig1_trajectory() -> (Vec<f64>, elr_core::dynamics::ModeTrajectory) {
    let p = fig1();
    let prof = FrequencyProfile::Tanh(p);
    let grid = linspace(-8.0 * p.d(), 8.0 * p.d(), 1601);
    let ic = positive_mode_ic(&prof, -16.0 * p.d(), 1.0).unwrap();
    let tr = integrate_mode(&prof, &ic, 8.0 * p.d(), &grid, &ModeOptions::default()).unwrap();
    (grid, tr)
}

#[test]
fn oracle_equivalence_fig1() {
    let start = Instant::now();
    let (grid, tr) = fig1_trajectory();
    let elapsed = start.elapsed().as_secs_f64();
    let p = fig1();
    let worst = grid
        .iter()
        .zip(&tr.g_minus)
        .map(|(t, g)| rel(*g, exact_g_minus(&p, *t).unwrap()))
        .fold(0.0, f64::max);
    verdict(
        "oracle equivalence",
        worst < 1e-6 && elapsed < 2.0,
        format!("max rel error {worst:.3e} (< 1e-6), integration {elapsed:.4} s (< 2 s)"),
    );
}

fn arbitration_sets() -> Vec<TanhParams> {
    let mut v = Vec::new();
    for ratio in [0.3, 0.6, 3.0] {
        for wd in [0.3, 1.0, 2.0] {
            v.push(params(ratio, wd));
        }
    }
    v
}

#[test]
fn terminal_s_arbitration() {
    let mut lines = Vec::new();
    let mut choices = Vec::new();
    for p in arbitration_sets() {
        let s = run(&p).terminal_s;
        let tc = terminal_sfactor(&p);
        let (eb, eh) = (rel(s, tc.beta_form), rel(s, tc.hyperbolic_form));
        let choice = match (eb < 1e-4, eh < 1e-4) {
            (true, false) => "beta-form",
            (false, true) => "hyperbolic-form",
            (true, true) => "both",
            (false, false) => "neither",
        };
        lines.push(format!(
            "ratio {:.3} wd {:.3}: S {s:.6e} beta-form rel {eb:.1e} hyperbolic-form rel {eh:.1e} -> {choice}",
            p.omega_plus() / p.omega_minus(),
            p.omega_minus() * p.d()
        ));
        choices.push(choice);
    }
    for l in &lines {
        println!("    {l}");
    }
    let first = choices[0];
    let consistent = choices.iter().all(|c| *c == first) && (first == "beta-form" || first == "hyperbolic-form");
    verdict(
        "terminal S arbitration",
        consistent,
        format!("numerical terminal S matches {first} on all sets: {consistent}"),
    );
}

#[test]
fn sudden_jump_limit() {
    let p = params(3.0, 1e-3);
    let s = run(&p).terminal_s;
    let target = sudden_jump_sfactor(1.0, 3.0).unwrap();
    let sinh2 = s / (2.0 * 3.0);
    verdict(
        "sudden-jump limit",
        (s - target).abs() < 1e-3,
        format!("terminal S {s:.6} vs {target:.6} (abs tol 1e-3); S/(2 w+/w-) = {sinh2:.6}"),
    );
}

#[test]
fn adiabatic_decay() {
    let xs = [2.0, 3.0, 4.0];
    let ys: Vec<f64> = xs.iter().map(|&wd| run(&params(3.0, wd)).terminal_s.ln()).collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let den: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let slope = num / den;
    verdict(
        "adiabatic decay",
        rel(slope, -2.0 * PI) < 0.05,
        format!("fitted slope {slope:.5} vs -2pi = {:.5} (5%)", -2.0 * PI),
    );
}

#[test]
fn large_ratio_thermal_form() {
    let p = large_ratio();
    let s = run(&p).terminal_s;
    let target = large_ratio_sfactor(0.3).unwrap();
    let sinh2 = s / (2.0 * 30.0);
    verdict(
        "large-ratio thermal form",
        rel(s, target) < 0.03,
        format!("terminal S {s:.6} vs {target:.5} (3%); S/(2 w+/w-) = {sinh2:.5}"),
    );
}

fn all_acceptance_params() -> Vec<TanhParams> {
    let mut v = arbitration_sets();
    v.push(params(3.0, 1e-3));
    for wd in [2.0, 3.0, 4.0] {
        v.push(params(3.0, wd));
    }
    v.push(large_ratio());
    v.push(fig3());
    for r in [2.0, 3.0, 5.0] {
        v.push(params(r, 1.0));
        v.push(params(1.0 / r, 1.0));
    }
    v
}

#[test]
fn wronskian_conservation() {
    let (_, tr) = fig1_trajectory();
    let mut worst = wronskian_drift(&tr);
    for p in all_acceptance_params() {
        worst = worst.max(wronskian_drift(&run(&p).trajectory));
    }
    verdict(
        "Wronskian conservation",
        worst < 1e-9,
        format!("max relative drift {worst:.3e} (< 1e-9)"),
    );
}

#[test]
fn bogoliubov_identity() {
    let mut rng = StdRng::seed_from_u64(20_240_601);
    let (mut worst, mut worst_inverse, mut failures) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..100 {
        let wm: f64 = rng.random_range(0.2..5.0);
        let wp: f64 = rng.random_range(0.2..5.0);
        let w0 = wm.max(wp) * rng.random_range(1.01..10.0);
        let d = rng.random_range(0.05..3.0);
        let p = TanhParams::from_frequencies(w0, wm, wp, d).unwrap();
        match bogoliubov(&p) {
            Ok(b) => {
                let diff = b.norm_difference();
                worst = worst.max((diff - wp / wm).abs());
                worst_inverse = worst_inverse.max((diff - wm / wp).abs());
            }
            Err(_) => failures += 1,
        }
    }
    verdict(
        "Bogoliubov identity",
        worst < 1e-10 && failures == 0,
        format!(
            "max ||a|^2-|b|^2 - w+/w-| = {worst:.3e} (< 1e-10), evaluation failures {failures}; \
             max deviation from w-/w+ = {worst_inverse:.3e}"
        ),
    );
}

#[test]
fn first_law_taylor_order() {
    let st = ThermalState::new(1.0, 1.0, 0.0, 1.0).unwrap();
    let delta = 1e-3;
    let r1 = first_law_residual(&st, delta, delta).unwrap().residual;
    let r2 = first_law_residual(&st, 0.5 * delta, 0.5 * delta).unwrap().residual;
    let ratio = r1 / r2;

    let s = st.entropy();
    let e = |w: f64, s: f64| {
        ThermalState::new(w, 1.0, 0.0, eps_from_entropy(s).unwrap())
            .unwrap()
            .energy()
    };
    let fd_errors = |h: f64| {
        let de_dw = (e(1.0 + h, s) - e(1.0 - h, s)) / (2.0 * h);
        let de_ds = (e(1.0, s + h) - e(1.0, s - h)) / (2.0 * h);
        ((de_dw + st.force()).abs(), (de_ds - st.temperature()).abs())
    };
    let (f1, t1) = fd_errors(delta);
    let (_, t2) = fd_errors(0.5 * delta);
    let t_ratio = t1 / t2;
    let pass = (ratio - 4.0).abs() <= 0.2 && f1 < delta * delta && t1 < delta * delta && (t_ratio - 4.0).abs() <= 0.2;
    verdict(
        "first-law Taylor order",
        pass,
        format!(
            "residual ratio {ratio:.4} (4 +/- 0.2); force FD error {f1:.2e}, \
             temperature FD error {t1:.2e} (< delta^2), temperature FD ratio {t_ratio:.4}"
        ),
    );
}

#[test]
fn entropy_round_trip() {
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let eps = 10f64.powf(-6.0 + (30f64.log10() + 6.0) * k as f64 / 999.0);
        let back = eps_from_entropy(entropy_from_eps(eps).unwrap()).unwrap();
        worst = worst.max(rel(back, eps));
    }
    let s_ln2 = entropy_from_eps(LN_2).unwrap();
    let eps_back = eps_from_entropy(2.0 * LN_2).unwrap();
    let exact = (s_ln2 - 2.0 * LN_2).abs().max((eps_back - LN_2).abs());
    verdict(
        "entropy round trip",
        worst < 1e-12 && exact < 1e-12,
        format!("max rel round-trip error {worst:.2e}; ln2 <-> 2 ln2 error {exact:.2e} (< 1e-12)"),
    );
}

#[test]
fn reconstruction_round_trip() {
    let p = fig3();
    let r = run(&p);
    let tr = &r.trajectory;
    let wi = tr.omega_i;
    let prime: Vec<f64> = (0..tr.len())
        .map(|k| r.record.omega[k] * tr.g_minus[k] / wi - 1.0)
        .collect();
    let rec = reconstruct_from_omega_prime(&tr.times, &r.record.big_omega, &prime, wi, wi).unwrap();
    let worst = rec
        .omega
        .iter()
        .zip(&r.record.omega)
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);

    let eps = 1.0;
    let t0 = wi / eps;
    let ratio: Vec<f64> = rec.temperature(eps).unwrap().iter().map(|t| t / t0).collect();
    let window = late_window(&p);
    let late = trailing_average(&rec.times, &ratio, window).unwrap();
    // turning points of T/T0 along the rise
    let turns = ratio
        .windows(3)
        .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0 && (w[1] - w[0]).abs() > 1e-9)
        .count();
    let starts_at_t0 = (ratio[0] - 1.0).abs() < 1e-6;
    let oscillates = turns >= 2;
    let pass = worst < 1e-3 && starts_at_t0 && oscillates && (2.5..=3.6).contains(&late);
    verdict(
        "reconstruction round trip",
        pass,
        format!(
            "max rel omega error {worst:.2e} (< 1e-3); T/T0 starts at {:.6}, final average {late:.4} \
             (band [2.5, 3.6]), turning points {turns}",
            ratio[0]
        ),
    );
}

#[test]
fn exchange_symmetry() {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for r in [2.0, 3.0, 5.0] {
        let a = run(&params(r, 1.0)).terminal_s;
        let b = run(&params(1.0 / r, 1.0)).terminal_s;
        let e = rel(b, a);
        let (ha, hb) = (
            terminal_sfactor(&params(r, 1.0)).hyperbolic_form,
            terminal_sfactor(&params(1.0 / r, 1.0)).hyperbolic_form,
        );
        let swapped = run(&params(r, 1.0).exchanged()).terminal_s;
        lines.push(format!(
            "r {r}: S(r) {a:.6e} S(1/r) {b:.6e} rel diff {e:.2e}; hyperbolic form {ha:.4e} vs {hb:.4e}; \
             S with w+ and w- swapped {swapped:.6e} (ratio {:.4})",
            a / swapped
        ));
        worst = worst.max(e);
    }
    for l in &lines {
        println!("    {l}");
    }
    verdict(
        "exchange symmetry",
        worst < 1e-4,
        format!("max relative difference {worst:.3e} (< 1e-4)"),
    );
}
