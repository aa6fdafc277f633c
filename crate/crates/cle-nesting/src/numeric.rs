//! Scalar root finding and one-dimensional minimization helpers.

use crate::error::{Error, Result};
use crate::ext::Extended;

/// Find a root of `f` in the bracket `[lo, hi]` given the already computed
/// endpoint values. Secant steps (Illinois-weighted false position) are
/// taken whenever they stay inside the bracket, with bisection as the
/// fallback, until `|f| <= tol_f`.
pub(crate) fn solve_bracketed<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    tol_f: f64,
    max_iter: usize,
) -> Result<f64> {
    if f_lo.abs() <= tol_f {
        return Ok(lo);
    }
    if f_hi.abs() <= tol_f {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::convergence(format!(
            "root bracket [{lo}, {hi}] does not straddle a sign change"
        )));
    }
    // Side retained on the previous iteration, for the Illinois weighting.
    let mut last_kept = 0i8;
    let mut collapsed = false;
    for _ in 0..max_iter {
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            collapsed = true;
            break;
        }
        let denom = f_hi - f_lo;
        let mut x = if denom != 0.0 {
            hi - f_hi * width / denom
        } else {
            0.5 * (lo + hi)
        };
        if !x.is_finite() || x <= lo || x >= hi {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if !fx.is_finite() {
            // Treat a blow-up as a same-sign value on the hi side: shrink
            // toward the finite part of the bracket.
            hi = x;
            continue;
        }
        if fx.abs() <= tol_f {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
            if last_kept == 1 {
                f_hi *= 0.5;
            }
            last_kept = 1;
        } else {
            hi = x;
            f_hi = fx;
            if last_kept == -1 {
                f_lo *= 0.5;
            }
            last_kept = -1;
        }
    }
    if collapsed {
        // The sign change is pinned between adjacent representable values:
        // that localizes the root to floating resolution even when a steep
        // slope keeps the residual above `tol_f`.
        return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
    }
    // Iterations ran out on a bracket that is still wide; accept the
    // midpoint if it meets the tolerance, otherwise report the failure.
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm.is_finite() && fm.abs() <= tol_f {
        Ok(mid)
    } else {
        Err(Error::convergence(format!(
            "bracketed solve stalled at x = {mid} with residual {fm}"
        )))
    }
}

pub(crate) fn le(a: Extended, b: Extended) -> bool {
    !matches!(a.partial_cmp(&b), Some(std::cmp::Ordering::Greater))
}

/// Golden-section minimization of a unimodal extended-valued function on
/// `[lo, hi]`, down to an interval of width `tol_x`. Returns the best
/// evaluated point.
pub(crate) fn golden_min<F: Fn(f64) -> Extended>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol_x: f64,
) -> (f64, Extended) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if le(f1, f2) { (x1, f1) } else { (x2, f2) };
    while hi - lo > tol_x {
        if le(f1, f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        let cand = if le(f1, f2) { (x1, f1) } else { (x2, f2) };
        if le(cand.1, best.1) {
            best = cand;
        }
    }
    best
}

/// Ternary-search minimization of a unimodal extended-valued function on
/// `[lo, hi]`, shrinking the interval to a relative width tolerance.
pub(crate) fn ternary_min<F: Fn(f64) -> Extended>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> (f64, Extended) {
    let mut best = (lo, f(lo));
    let at_hi = f(hi);
    if le(at_hi, best.1) {
        best = (hi, at_hi);
    }
    while hi - lo > rel_tol * hi.abs().max(lo.abs()).max(1.0) {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        let fm1 = f(m1);
        let fm2 = f(m2);
        if le(fm1, best.1) {
            best = (m1, fm1);
        }
        if le(fm2, best.1) {
            best = (m2, fm2);
        }
        if le(fm1, fm2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best
}

/// Coarse inclusive scan of `n` points followed by a local refinement.
/// The scan makes the refinement robust when `f` is infinite on parts of
/// the interval (the plateau can hide the valley from a blind ternary
/// search). Returns the best point seen overall.
pub(crate) fn scan_then_refine<F: Fn(f64) -> Extended>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
    refine: impl Fn(&F, f64, f64) -> (f64, Extended),
) -> (f64, Extended) {
    debug_assert!(n >= 2 && hi >= lo);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best_i = 0usize;
    let mut best = (lo, f(lo));
    for i in 1..n {
        let x = if i == n - 1 { hi } else { lo + i as f64 * step };
        let fx = f(x);
        if le(fx, best.1) && fx < best.1 {
            best = (x, fx);
            best_i = i;
        }
    }
    let rlo = if best_i == 0 { lo } else { lo + (best_i - 1) as f64 * step };
    let rhi = if best_i + 1 >= n { hi } else { lo + (best_i + 1) as f64 * step };
    let refined = refine(f, rlo, rhi);
    if le(refined.1, best.1) {
        refined
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::Extended::{Finite, PosInf};

    #[test]
    fn bracketed_solve_hits_a_cubic_root() {
        let f = |x: f64| x * x * x - 2.0;
        let root = solve_bracketed(f, 0.0, 2.0, -2.0, 6.0, 1e-13, 200).unwrap();
        assert!(
            (root - 2f64.powf(1.0 / 3.0)).abs() < 1e-10,
            "root {root} should be cbrt(2)"
        );
    }

    #[test]
    fn bracketed_solve_rejects_same_sign_bracket() {
        let f = |x: f64| x * x + 1.0;
        assert!(solve_bracketed(f, -1.0, 1.0, 2.0, 2.0, 1e-12, 50).is_err());
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden_min(|x| Finite((x - 0.3).powi(2)), -4.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6, "minimizer {x}");
        assert!(v.expect_finite("parabola") < 1e-12);
    }

    #[test]
    fn ternary_finds_vee_minimum() {
        let f = |x: f64| Finite((x - 1.25).abs());
        let (x, _) = ternary_min(&f, 0.0, 3.0, 1e-12);
        assert!((x - 1.25).abs() < 1e-9, "minimizer {x}");
    }

    #[test]
    fn scan_survives_infinite_plateaus() {
        // Infinite outside [2, 3], valley at 2.6. A blind ternary search on
        // [0, 10] could discard the finite region; the scan must not.
        let f = |x: f64| {
            if (2.0..=3.0).contains(&x) {
                Finite((x - 2.6).powi(2))
            } else {
                PosInf
            }
        };
        let (x, v) = scan_then_refine(&f, 0.0, 10.0, 64, |g, a, b| golden_min(g, a, b, 1e-11));
        assert!((x - 2.6).abs() < 1e-5, "minimizer {x}");
        assert!(v.is_finite());
    }
}
