//! Empirical survival curves for the overshoot and geometric-sum bounds.
//!
//! Both renewal lemmas assert an exponential tail: the overshoot
//! S_{τ_x} − x at the first passage over x, and the sum S_N of a
//! geometrically distributed number of jumps, each satisfy
//!
//! ```text
//!     P[ value ≥ a ] ≤ C e^{−c a}
//! ```
//!
//! for some rate c > 0 (for the overshoot every c < λ_c with Λ_κ(c) < ∞ is
//! admissible). The helpers here return raw empirical survival points; the
//! exponential decay is checked by fitting a line to the log survival with
//! [`fit_log_slope`] and comparing the slope against the admissible rate.

use cle_nesting::radius_law::{KappaParam, RadiusLaw};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn checked_grid(a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() {
        return Err(Error::Config("a_grid must not be empty".into()));
    }
    if a_grid.iter().any(|a| !a.is_finite()) {
        return Err(Error::Config("a_grid entries must be finite".into()));
    }
    Ok(())
}

fn survival_points(samples: &[f64], a_grid: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len() as f64;
    a_grid
        .iter()
        .map(|&a| {
            let above = samples.iter().filter(|&&v| v >= a).count();
            (a, above as f64 / n)
        })
        .collect()
}

/// Empirical survival function of the first-passage overshoot S_{τ_x} − x
/// at each point of `a_grid`, from `n` simulated paths.
///
/// The fitted log-linear slope over a grid reaching a few units should come
/// out at or below −λ_c/4 (a conservative admissible exponent: the tilt
/// λ_c/2 keeps the jump cumulant finite).
pub fn overshoot_tail_test(
    p: KappaParam,
    x: f64,
    a_grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Config(format!(
            "threshold x = {x} must be positive and finite"
        )));
    }
    if n == 0 {
        return Err(Error::Config("need at least one path".into()));
    }
    checked_grid(a_grid)?;
    let law = RadiusLaw::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut overshoots = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let mut s = 0.0f64;
        while s < x {
            s += law.sample(&mut rng, 0.0)?;
        }
        overshoots.push(s - x);
    }
    Ok(survival_points(&overshoots, a_grid))
}

/// Empirical survival function of S_N where N is geometric with parameter
/// 1 − q (so P[N ≥ k] = q^{k−1}) and the jumps are untilted draws of the
/// log-radius law.
///
/// The log survival must eventually decay linearly; as q → 0 the sum
/// degenerates to a single jump and the survival approaches 1 − cdf_T(a).
pub fn geometric_sum_tail_test(
    p: KappaParam,
    q: f64,
    a_grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Config(format!("q = {q} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::Config("need at least one path".into()));
    }
    checked_grid(a_grid)?;
    let law = RadiusLaw::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let mut s = law.sample(&mut rng, 0.0)?;
        while rng.random::<f64>() < q {
            s += law.sample(&mut rng, 0.0)?;
        }
        sums.push(s);
    }
    Ok(survival_points(&sums, a_grid))
}

/// Least-squares slope of log survival against a, with its standard error.
/// Points with zero survival are skipped; at least three surviving points
/// are required for the error estimate.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, s)| s > 0.0)
        .map(|&(a, s)| (a, s.ln()))
        .collect();
    let m = data.len();
    if m < 3 {
        return Err(Error::Config(format!(
            "need at least 3 points with positive survival, have {m}"
        )));
    }
    let mf = m as f64;
    let mean_a = data.iter().map(|d| d.0).sum::<f64>() / mf;
    let mean_y = data.iter().map(|d| d.1).sum::<f64>() / mf;
    let sxx: f64 = data.iter().map(|d| (d.0 - mean_a).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("all grid points coincide".into()));
    }
    let sxy: f64 = data
        .iter()
        .map(|d| (d.0 - mean_a) * (d.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_a;
    let ss_res: f64 = data
        .iter()
        .map(|d| (d.1 - intercept - slope * d.0).powi(2))
        .sum();
    let stderr = (ss_res / (mf - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}
