//! Dormand-Prince 8(5,3) integrator with continuous (dense) output.
//!
//! Fixed-size state `[f64; N]`. The tableau, the combined fifth/third order
//! error estimate and the seventh-order interpolant follow Hairer & Wanner's
//! DOP853.

use crate::{Error, Result};

const STAGES: usize = 12;
const EXTENDED: usize = 16;

const C: [f64; 16] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
    1.0,
    0.1,
    0.2,
    0.7777777777777778,
];
const A: [&[f64]; 16] = [
    &[],
    &[0.05260015195876773],
    &[0.0197250569845379, 0.0591751709536137],
    &[0.02958758547680685, 0.0, 0.08876275643042054],
    &[0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792],
    &[0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242],
    &[
        0.037109375,
        0.0,
        0.0,
        0.17025221101954405,
        0.06021653898045596,
        -0.017578125,
    ],
    &[
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
    ],
    &[
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
    ],
    &[
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
    ],
    &[
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
    ],
    &[
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
    ],
    &[
        0.054293734116568765,
        0.0,
        0.0,
        0.0,
        0.0,
        4.450312892752409,
        1.8915178993145003,
        -5.801203960010585,
        0.3111643669578199,
        -0.1521609496625161,
        0.20136540080403034,
        0.04471061572777259,
    ],
    &[
        0.056167502283047954,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.25350021021662483,
        -0.2462390374708025,
        -0.12419142326381637,
        0.15329179827876568,
        0.00820105229563469,
        0.007567897660545699,
        -0.008298,
    ],
    &[
        0.03183464816350214,
        0.0,
        0.0,
        0.0,
        0.0,
        0.028300909672366776,
        0.053541988307438566,
        -0.05492374857139099,
        0.0,
        0.0,
        -0.00010834732869724932,
        0.0003825710908356584,
        -0.00034046500868740456,
        0.1413124436746325,
    ],
    &[
        -0.42889630158379194,
        0.0,
        0.0,
        0.0,
        0.0,
        -4.697621415361164,
        7.683421196062599,
        4.06898981839711,
        0.3567271874552811,
        0.0,
        0.0,
        0.0,
        -0.0013990241651590145,
        2.9475147891527724,
        -9.15095847217987,
    ],
];
const B: [f64; 12] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];
const E3: [f64; 13] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
    0.0,
];
const E5: [f64; 13] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
    0.0,
];
const D: [[f64; 16]; 4] = [
    [
        -8.428938276109013,
        0.0,
        0.0,
        0.0,
        0.0,
        0.5667149535193777,
        -3.0689499459498917,
        2.38466765651207,
        2.117034582445028,
        -0.871391583777973,
        2.2404374302607883,
        0.6315787787694688,
        -0.08899033645133331,
        18.148505520854727,
        -9.194632392478356,
        -4.436036387594894,
    ],
    [
        10.427508642579134,
        0.0,
        0.0,
        0.0,
        0.0,
        242.28349177525817,
        165.20045171727028,
        -374.5467547226902,
        -22.113666853125306,
        7.733432668472264,
        -30.674084731089398,
        -9.332130526430229,
        15.697238121770845,
        -31.139403219565178,
        -9.35292435884448,
        35.81684148639408,
    ],
    [
        19.985053242002433,
        0.0,
        0.0,
        0.0,
        0.0,
        -387.0373087493518,
        -189.17813819516758,
        527.8081592054236,
        -11.57390253995963,
        6.8812326946963,
        -1.0006050966910838,
        0.7777137798053443,
        -2.778205752353508,
        -60.19669523126412,
        84.32040550667716,
        11.99229113618279,
    ],
    [
        -25.69393346270375,
        0.0,
        0.0,
        0.0,
        0.0,
        -154.18974869023643,
        -231.5293791760455,
        357.6391179106141,
        93.40532418362432,
        -37.45832313645163,
        104.0996495089623,
        29.8402934266605,
        -43.53345659001114,
        96.32455395918828,
        -39.17726167561544,
        -149.72683625798564,
    ],
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step; `None` means the whole span.
    pub h_max: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
            h_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest normalized local error estimate among accepted steps.
    pub max_error_estimate: f64,
}

fn combine<const N: usize>(y: &[f64; N], h: f64, k: &[[f64; N]], a: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (kj, &aj) in k.iter().zip(a) {
        if aj != 0.0 {
            for i in 0..N {
                out[i] += h * aj * kj[i];
            }
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` and returns the solution
/// on `output` (sorted, inside `[t0, t_end]`).
///
/// `on_step` sees every accepted step end point and may abort the run.
pub fn integrate<const N: usize, F, S>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    output: &[f64],
    opts: &Options,
    mut on_step: S,
) -> Result<(Vec<[f64; N]>, Stats)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    S: FnMut(f64, &[f64; N]) -> Result<()>,
{
    if !(t_end > t0) {
        return Err(Error::invalid("t_end", format!("must exceed t0 = {t0}, got {t_end}")));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::invalid("tolerance", "rtol and atol must be positive"));
    }
    if output.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("output_grid", "must be sorted"));
    }
    if let (Some(&first), Some(&last)) = (output.first(), output.last()) {
        if first < t0 || last > t_end {
            return Err(Error::invalid(
                "output_grid",
                format!("must lie within [{t0}, {t_end}], got [{first}, {last}]"),
            ));
        }
    }

    let span = t_end - t0;
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let mut stats = Stats::default();
    let mut out = Vec::with_capacity(output.len());
    let mut next = 0;
    while next < output.len() && output[next] == t0 {
        out.push(y0);
        next += 1;
    }

    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; EXTENDED];
    k[0] = f(t, &y)?;
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k[0], opts, h_max)?;
    stats.evaluations += 1;

    while t < t_end {
        let mut rejected = false;
        let (t_new, y_new, step) = loop {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::TooManySteps {
                    t,
                    max_steps: opts.max_steps,
                });
            }
            if h <= 10.0 * f64::EPSILON * t.abs().max(span) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let t_new = if t + h >= t_end { t_end } else { t + h };
            let step = t_new - t;

            for s in 1..STAGES {
                let ys = combine(&y, step, &k[..s], A[s]);
                k[s] = f(t + C[s] * step, &ys)?;
            }
            let y_new = combine(&y, step, &k[..STAGES], &B);
            k[STAGES] = f(t_new, &y_new)?;
            stats.evaluations += STAGES;

            let (mut e5, mut e3) = (0.0, 0.0);
            for i in 0..N {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                let (mut a5, mut a3) = (0.0, 0.0);
                for j in 0..=STAGES {
                    a5 += E5[j] * k[j][i];
                    a3 += E3[j] * k[j][i];
                }
                e5 += (a5 / sc).powi(2);
                e3 += (a3 / sc).powi(2);
            }
            let err = if e5 == 0.0 && e3 == 0.0 {
                0.0
            } else {
                step * e5 / (((e5 + 0.01 * e3) * N as f64).sqrt())
            };

            if err < 1.0 {
                let mut factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR)
                };
                if rejected {
                    factor = factor.min(1.0);
                }
                stats.accepted += 1;
                stats.max_error_estimate = stats.max_error_estimate.max(err);
                h = (step * factor).min(h_max);
                break (t_new, y_new, step);
            }
            stats.rejected += 1;
            rejected = true;
            h = step * (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR);
        };

        if next < output.len() && output[next] <= t_new {
            for s in STAGES + 1..EXTENDED {
                let ys = combine(&y, step, &k[..s], A[s]);
                k[s] = f(t + C[s] * step, &ys)?;
            }
            stats.evaluations += EXTENDED - STAGES - 1;
            let mut rows = [[0.0; N]; 7];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                rows[0][i] = dy;
                rows[1][i] = step * k[0][i] - dy;
                rows[2][i] = 2.0 * dy - step * (k[STAGES][i] + k[0][i]);
                for (r, d) in D.iter().enumerate() {
                    rows[3 + r][i] = step * (0..EXTENDED).map(|j| d[j] * k[j][i]).sum::<f64>();
                }
            }
            while next < output.len() && output[next] <= t_new {
                let x = (output[next] - t) / step;
                let mut yi = [0.0; N];
                for (r, row) in rows.iter().rev().enumerate() {
                    for i in 0..N {
                        yi[i] += row[i];
                        yi[i] *= if r % 2 == 0 { x } else { 1.0 - x };
                    }
                }
                for i in 0..N {
                    yi[i] += y[i];
                }
                out.push(yi);
                next += 1;
            }
        }

        t = t_new;
        y = y_new;
        k[0] = k[STAGES];
        on_step(t, &y)?;
    }
    Ok((out, stats))
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    opts: &Options,
    h_max: f64,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(h_max);
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y[i] + h * f0[i];
    }
    let f1 = f(t + h, &y1)?;
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    Ok((100.0 * h).min(h1).min(h_max))
}
