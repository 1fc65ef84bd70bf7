use anyhow::Result;
use clap::{Args, Subcommand};
use elr_core::analytic::{
    bogoliubov, bogoliubov_magnitudes, exact_g_minus, exact_mode_with_derivative, large_ratio_sfactor,
    sudden_jump_sfactor, terminal_sfactor,
};
use elr_core::profiles::TanhParams;
use serde_json::{json, Value};

use crate::config::config_err;

#[derive(Debug, Args)]
pub struct TanhArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega_minus: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_plus: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub d: f64,
}

impl TanhArgs {
    fn params(&self) -> Result<TanhParams> {
        TanhParams::from_frequencies(self.omega0, self.omega_minus, self.omega_plus, self.d)
            .map_err(|e| config_err(e.to_string()))
    }
}

#[derive(Debug, Subcommand)]
pub enum Which {
    /// Exact mode g(t), its derivative and g_minus.
    Mode {
        #[command(flatten)]
        params: TanhArgs,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        mass: f64,
    },
    /// Bogoliubov coefficients alpha and beta.
    Bogoliubov {
        #[command(flatten)]
        params: TanhArgs,
    },
    /// Both closed-form candidates for the terminal squeezing factor.
    Terminal {
        #[command(flatten)]
        params: TanhArgs,
    },
    /// Sudden-jump limit for the frequency ratio omega_plus/omega_minus.
    Sudden {
        #[arg(long, allow_negative_numbers = true)]
        ratio: f64,
    },
    /// Large-ratio thermal form at fixed omega_minus * d.
    LargeRatio {
        #[arg(long, allow_negative_numbers = true)]
        wd: f64,
    },
}

fn invalid(e: elr_core::Error) -> anyhow::Error {
    config_err(e.to_string())
}

pub fn evaluate(which: &Which) -> Result<Value> {
    Ok(match which {
        Which::Mode { params, t, mass } => {
            let p = params.params()?;
            let (g, gd) = exact_mode_with_derivative(&p, *mass, *t).map_err(invalid)?;
            let g_minus = exact_g_minus(&p, *t).map_err(invalid)?;
            json!({
                "t": t,
                "re_g": g.re,
                "im_g": g.im,
                "re_gdot": gd.re,
                "im_gdot": gd.im,
                "g_minus": g_minus,
            })
        }
        Which::Bogoliubov { params } => {
            let p = params.params()?;
            let b = bogoliubov(&p)?;
            let (a2, b2) = bogoliubov_magnitudes(&p);
            json!({
                "alpha": { "re": b.alpha.re, "im": b.alpha.im },
                "beta": { "re": b.beta.re, "im": b.beta.im },
                "abs_alpha_sq": a2,
                "abs_beta_sq": b2,
                "abs_alpha_sq_minus_abs_beta_sq": b.norm_difference(),
                "omega_minus_over_omega_plus": p.omega_minus() / p.omega_plus(),
            })
        }
        Which::Terminal { params } => {
            let p = params.params()?;
            let tc = terminal_sfactor(&p);
            json!({ "eq_Sfactor": tc.beta_form, "eq_E_infty": tc.hyperbolic_form })
        }
        Which::Sudden { ratio } => {
            if !(ratio.is_finite() && *ratio > 0.0) {
                return Err(config_err(format!(
                    "invalid parameter `ratio`: must be positive, got {ratio}"
                )));
            }
            json!({ "ratio": ratio, "sudden_jump_S": sudden_jump_sfactor(1.0, *ratio).map_err(invalid)? })
        }
        Which::LargeRatio { wd } => {
            json!({ "omega_minus_d": wd, "large_ratio_S": large_ratio_sfactor(*wd).map_err(invalid)? })
        }
    })
}
