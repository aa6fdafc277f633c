//! Run configuration and reporting.
//!
//! A [`SimConfig`] describes one estimation run of the window probability
//!
//! ```text
//!     P[ nu1 * r <= N_r <= nu2 * r ]        (optionally joint with
//!       alpha1 * r <= sum_{i<=N_r} xi_i <= alpha2 * r)
//! ```
//!
//! where `N_r` is the first-passage count of the renewal sequence built from
//! the log-radius jump law. The [`SimReport`] carries the estimate together
//! with the implied decay rate `-log(p_hat) / r` and the analytic rate it
//! should approach as `r` grows.

use cle_nesting::radius_law::KappaParam;
use cle_nesting::weighted::WeightLaw;
use cle_nesting::Extended;

use crate::error::{Error, Result};

/// How the importance-sampling tilt is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TiltChoice {
    /// Dominant-point tilt derived from the window: the jump tilt solves
    /// Λ'(λ) = 1/ν̂ at the window endpoint nearer the typical density, and
    /// tilting is disabled when the window already contains it. Weighted
    /// runs pick the weight tilt η the same way on the α window.
    Auto,
    /// Plain Monte Carlo, no reweighting.
    Off,
    /// Explicit jump tilt; must lie strictly below the critical tilt.
    /// Weighted runs still choose η automatically.
    Fixed(f64),
}

/// Immutable description of one simulation run.
#[derive(Clone)]
pub struct SimConfig {
    pub kappa: KappaParam,
    /// Per-renewal weight law for joint runs; `None` for plain counting.
    pub weight: Option<WeightLaw>,
    /// Log-scale depth, `r = log(1/eps)`.
    pub r: f64,
    /// Count window `(nu1, nu2)` with `0 < nu1 <= nu2`.
    pub window: (f64, f64),
    /// Weight window `(alpha1, alpha2)` for joint runs.
    pub alpha_window: Option<(f64, f64)>,
    pub n_samples: u64,
    pub seed: u64,
    pub tilt: TiltChoice,
    /// Thread count. Estimates are bit-identical for any value >= 1.
    pub workers: usize,
}

impl SimConfig {
    /// Checks the fields every run needs. Weighted-only requirements are
    /// enforced by `simulate_weighted_window` itself.
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::Config(format!(
                "depth r = {} must be positive and finite",
                self.r
            )));
        }
        let (lo, hi) = self.window;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!(
                "window [{lo}, {hi}] must satisfy 0 < nu1 <= nu2"
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some((a_lo, a_hi)) = self.alpha_window {
            if !(a_lo.is_finite() && a_hi.is_finite() && a_lo <= a_hi) {
                return Err(Error::Config(format!(
                    "alpha window [{a_lo}, {a_hi}] must be ordered and finite"
                )));
            }
        }
        if let TiltChoice::Fixed(lam) = self.tilt {
            let cap = self.kappa.lambda_crit();
            if !(lam.is_finite() && lam < cap) {
                return Err(Error::Config(format!(
                    "explicit tilt {lam} must be finite and below the critical tilt {cap}"
                )));
            }
        }
        Ok(())
    }
}

/// Integer count bounds of the window: the event {nu1 r <= N <= nu2 r} for
/// an integer N is {ceil(nu1 r) <= N <= floor(nu2 r)}, and N >= 1 always.
pub(crate) fn count_bounds(r: f64, window: (f64, f64)) -> (u64, u64) {
    let lo = (window.0 * r).ceil().max(1.0) as u64;
    let hi = (window.1 * r).floor().max(0.0) as u64;
    (lo, hi)
}

/// Outcome of one simulation run.
#[derive(Clone, Debug)]
pub struct SimReport {
    /// Importance-weighted estimate of the window probability.
    pub p_hat: f64,
    /// Standard error of `p_hat` (sample variance of the weighted
    /// indicator, so tilting is accounted for).
    pub stderr: f64,
    /// `-log(p_hat) / r`; infinite when no path hit the window.
    pub implied_rate: f64,
    /// Analytic decay rate of the window probability.
    pub theory_rate: Extended,
    /// Kish effective sample size of the contributing weights.
    pub n_effective: f64,
    pub seed: u64,
    pub r: f64,
    pub window: (f64, f64),
    pub wallclock_ms: u64,
}

fn json_float(v: f64, digits: usize) -> serde_json::Value {
    if v.is_nan() {
        return serde_json::Value::String("nan".into());
    }
    if v.is_infinite() {
        let s = if v > 0.0 { "inf" } else { "-inf" };
        return serde_json::Value::String(s.into());
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, v)
        .parse()
        .expect("a formatted float always parses back");
    serde_json::Value::from(rounded)
}

impl SimReport {
    /// JSON rendering with floats rounded to `digits` significant digits
    /// (clamped to 1..=17). Infinite rates serialize as the string "inf".
    pub fn to_json(&self, digits: usize) -> String {
        let d = digits.clamp(1, 17);
        let theory = match self.theory_rate {
            Extended::Finite(v) => json_float(v, d),
            Extended::PosInf => serde_json::Value::String("inf".into()),
            Extended::NegInf => serde_json::Value::String("-inf".into()),
        };
        serde_json::json!({
            "p_hat": json_float(self.p_hat, d),
            "stderr": json_float(self.stderr, d),
            "implied_rate": json_float(self.implied_rate, d),
            "theory_rate": theory,
            "n_effective": json_float(self.n_effective, d),
            "seed": self.seed,
            "r": json_float(self.r, d),
            "window": [json_float(self.window.0, d), json_float(self.window.1, d)],
            "wallclock_ms": self.wallclock_ms,
        })
        .to_string()
    }
}
