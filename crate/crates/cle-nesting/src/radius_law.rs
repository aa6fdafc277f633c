//! The jump law of the log conformal radius across one nesting level.
//!
//! When a conformal loop ensemble with parameter κ in (8/3, 8) is explored
//! inward from an interior point, the log conformal radius seen from that
//! point decreases by an independent copy of a fixed positive law T at each
//! nesting level. This module provides that law: cumulant generating
//! function, density, distribution function, and tilted samplers.
//!
//! With a = 1 − 4/κ the cumulant generating function is
//!
//! ```text
//! Λ(λ) = log(−cos(4π/κ)) − log g(a² + 8λ/κ),
//! g(s) = cos(π√s)  for s ≥ 0,      g(s) = cosh(π√(−s))  for s < 0,
//! ```
//!
//! finite exactly for λ < λ_c = 1 − 2/κ − 3κ/32, the tilt at which s
//! reaches 1/4. The density is the alternating exponential series
//!
//! ```text
//! f(x) = c · Σ_{j≥0} (−1)^j (j + ½) e^{−d_j x},
//! d_j = ((j + ½)² − a²) · κ/8,      c = −κ cos(4π/κ) / (4π),
//! ```
//!
//! whose smallest rate d_0 equals λ_c, so the right tail is exponential
//! with rate λ_c. Exponential tilting by η < λ_c shifts every rate to
//! d_j − η and scales the series by e^{−Λ(η)}. Samplers invert a
//! precomputed monotone cubic CDF table and polish each draw by Newton
//! steps against the exact series.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ext::Extended;
use crate::interp::MonotoneCubic;
use crate::ldp::{MgfSpec, TiltDomain};

/// Below this point the distribution function is evaluated by a cubic
/// extrapolation instead of the series (the true mass there is far below
/// double precision anyway; the alternating series loses all digits).
const X_FLOOR: f64 = 1e-3;
/// Hard cap on series terms before reporting non-convergence.
const SERIES_CAP: usize = 100_000;
/// Terms always summed before the truncation test may fire.
const MIN_TERMS: usize = 8;
/// Default relative truncation tolerance for the density series.
const DEFAULT_DENSITY_TOL: f64 = 1e-15;
/// CDF tables refine until adjacent knots differ by at most this much...
const TABLE_MAX_DELTA_F: f64 = 1.0 / 2048.0;
/// ...or this many knots have been spent.
const TABLE_MAX_KNOTS: usize = 4096;
/// Tables extend until the tilted survival probability drops below this.
const TABLE_TAIL_EPS: f64 = 1e-15;

/// The κ parameter of a loop ensemble together with its critical tilt.
///
/// Only the nesting-relevant range 8/3 < κ < 8 is accepted: below it loops
/// do not nest, above it the jump law degenerates.
#[derive(Clone, Copy, Debug)]
pub struct KappaParam {
    kappa: f64,
    lambda_crit: f64,
}

impl KappaParam {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 8.0 / 3.0 && kappa < 8.0) {
            return Err(Error::domain(format!(
                "kappa = {kappa} is outside the nesting range (8/3, 8)"
            )));
        }
        Ok(KappaParam {
            kappa,
            lambda_crit: 1.0 - 2.0 / kappa - 3.0 * kappa / 32.0,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// λ_c = 1 − 2/κ − 3κ/32, the supremum of the finiteness domain of the
    /// cumulant generating function and the exponential rate of the right
    /// tail of T.
    pub fn lambda_crit(&self) -> f64 {
        self.lambda_crit
    }

    /// a = 1 − 4/κ.
    fn rate_offset(&self) -> f64 {
        1.0 - 4.0 / self.kappa
    }

    /// c = −κ cos(4π/κ)/(4π), the series prefactor (positive on the whole
    /// admissible κ range).
    fn series_prefactor(&self) -> f64 {
        -self.kappa * (4.0 * PI / self.kappa).cos() / (4.0 * PI)
    }

    /// The law packaged for the large-deviation machinery: tilt domain
    /// (−∞, λ_c), support (0, ∞).
    pub fn mgf(&self) -> MgfSpec {
        let p = *self;
        MgfSpec::new(
            TiltDomain::below(self.lambda_crit),
            (Extended::Finite(0.0), Extended::PosInf),
            move |lam| cumulant_unchecked(p, lam),
        )
        .with_deriv(move |lam| cumulant_deriv_unchecked(p, lam))
    }
}

fn s_of(p: KappaParam, lam: f64) -> f64 {
    let a = p.rate_offset();
    a * a + 8.0 * lam / p.kappa
}

fn cumulant_unchecked(p: KappaParam, lam: f64) -> f64 {
    let s = s_of(p, lam);
    let g = if s >= 0.0 {
        (PI * s.sqrt()).cos()
    } else {
        (PI * (-s).sqrt()).cosh()
    };
    (-(4.0 * PI / p.kappa).cos()).ln() - g.ln()
}

fn cumulant_deriv_unchecked(p: KappaParam, lam: f64) -> f64 {
    let s = s_of(p, lam);
    let h = if s == 0.0 {
        PI
    } else if s > 0.0 {
        let r = s.sqrt();
        (PI * r).tan() / r
    } else {
        let q = (-s).sqrt();
        (PI * q).tanh() / q
    };
    4.0 * PI / p.kappa * h
}

/// Λ(λ), the cumulant generating function of the jump T.
pub fn lambda_kappa(p: KappaParam, lam: f64) -> Result<f64> {
    if !(lam < p.lambda_crit()) {
        return Err(Error::domain(format!(
            "tilt {lam} is not below the critical tilt {}",
            p.lambda_crit()
        )));
    }
    Ok(cumulant_unchecked(p, lam))
}

/// Λ'(λ) = (4π/κ)·h(s) with h(s) = tan(π√s)/√s for s > 0, h(0) = π and
/// h(s) = tanh(π√(−s))/√(−s) for s < 0. Strictly increasing; diverges as
/// λ → λ_c.
pub fn lambda_kappa_deriv(p: KappaParam, lam: f64) -> Result<f64> {
    if !(lam < p.lambda_crit()) {
        return Err(Error::domain(format!(
            "tilt {lam} is not below the critical tilt {}",
            p.lambda_crit()
        )));
    }
    Ok(cumulant_deriv_unchecked(p, lam))
}

/// E[T] = Λ'(0). Closed forms at special points: π² at κ = 4, 2π√3 at
/// κ = 6.
pub fn mean_t(p: KappaParam) -> f64 {
    cumulant_deriv_unchecked(p, 0.0)
}

/// Shared state for the (possibly tilted) density and survival series.
#[derive(Clone, Copy, Debug)]
struct SeriesParams {
    a2: f64,
    kappa_eighth: f64,
    /// c · e^{−Λ(tilt)}; reduces to c exactly when the tilt is zero.
    prefactor: f64,
    tilt: f64,
}

impl SeriesParams {
    fn new(p: KappaParam, tilt: f64) -> Result<Self> {
        if !(tilt < p.lambda_crit()) {
            return Err(Error::domain(format!(
                "tilt {tilt} is not below the critical tilt {}",
                p.lambda_crit()
            )));
        }
        let norm = if tilt == 0.0 {
            1.0
        } else {
            (-cumulant_unchecked(p, tilt)).exp()
        };
        let a = p.rate_offset();
        Ok(SeriesParams {
            a2: a * a,
            kappa_eighth: p.kappa() / 8.0,
            prefactor: p.series_prefactor() * norm,
            tilt,
        })
    }

    /// d_j − tilt, positive and strictly increasing in j.
    fn rate(&self, j: usize) -> f64 {
        let jh = j as f64 + 0.5;
        (jh * jh - self.a2) * self.kappa_eighth - self.tilt
    }

    /// Tilted density at x > 0.
    fn density(&self, x: f64, tol: f64) -> Result<f64> {
        self.sum(x, tol, |_| 1.0)
    }

    /// Tilted survival probability P[T > x] at x > 0, by term-wise
    /// integration of the density series.
    fn survival(&self, x: f64, tol: f64) -> Result<f64> {
        self.sum(x, tol, |rate| 1.0 / rate)
    }

    /// Σ (−1)^j (j+½) e^{−rate_j x} w(rate_j) times the prefactor.
    ///
    /// Terms are added until the next term's magnitude falls below `tol`
    /// times the largest magnitude seen, with at least `MIN_TERMS` summed
    /// (the early terms can grow before the Gaussian-in-j decay sets in).
    /// Tiny negative totals from cancellation are clamped to zero.
    fn sum(&self, x: f64, tol: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
        let term_mag = |j: usize| {
            let rate = self.rate(j);
            (j as f64 + 0.5) * (-rate * x).exp() * weight(rate)
        };
        let mut total = 0.0f64;
        let mut max_mag = 0.0f64;
        let mut j = 0usize;
        let mut mag = term_mag(0);
        loop {
            total += if j % 2 == 0 { mag } else { -mag };
            max_mag = max_mag.max(mag);
            let next = term_mag(j + 1);
            if j + 1 >= MIN_TERMS && next <= tol * max_mag {
                break;
            }
            mag = next;
            j += 1;
            if j >= SERIES_CAP {
                return Err(Error::convergence(format!(
                    "jump-law series still growing after {SERIES_CAP} terms at x = {x}"
                )));
            }
        }
        let mut out = self.prefactor * total;
        if out < 0.0 && out > -1e-12 {
            out = 0.0;
        }
        Ok(out)
    }
}

fn cdf_value(series: &SeriesParams, x: f64, tol: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x < X_FLOOR {
        return small_x_cdf(series, x, tol);
    }
    Ok((1.0 - series.survival(x, tol)?).clamp(0.0, 1.0))
}

/// Distribution function below the series floor: the cubic through the
/// nodes {1, 2, 3, 4}·X_FLOOR, clamped between 0 and the floor value. The
/// true mass down there is below 1e-300, so this branch exists to keep the
/// function total and monotone rather than to add digits.
fn small_x_cdf(series: &SeriesParams, x: f64, tol: f64) -> Result<f64> {
    let mut nodes = [0.0f64; 4];
    let mut vals = [0.0f64; 4];
    for i in 0..4 {
        nodes[i] = (i + 1) as f64 * X_FLOOR;
        vals[i] = (1.0 - series.survival(nodes[i], tol)?).clamp(0.0, 1.0);
    }
    let mut acc = 0.0;
    for i in 0..4 {
        let mut basis = 1.0;
        for k in 0..4 {
            if k != i {
                basis *= (x - nodes[k]) / (nodes[i] - nodes[k]);
            }
        }
        acc += basis * vals[i];
    }
    Ok(acc.clamp(0.0, vals[0]))
}

/// Density of T at x > 0 (untilted), to the default series tolerance.
pub fn density_t(p: KappaParam, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!(
            "density point x = {x} must be positive"
        )));
    }
    SeriesParams::new(p, 0.0)?.density(x, DEFAULT_DENSITY_TOL)
}

/// Distribution function P[T ≤ x] (untilted), to the default series
/// tolerance. Zero for x ≤ 0.
pub fn cdf_t(p: KappaParam, x: f64) -> Result<f64> {
    cdf_value(&SeriesParams::new(p, 0.0)?, x, DEFAULT_DENSITY_TOL)
}

/// Inverse-CDF sampling table for one (κ, tilt) pair.
#[derive(Clone)]
struct CdfTable {
    series: SeriesParams,
    tol: f64,
    table: MonotoneCubic,
    f_lo: f64,
    x_hi: f64,
    f_hi: f64,
    /// d_0 − tilt, the exact exponential rate of the right tail.
    tail_rate: f64,
}

impl CdfTable {
    fn build(p: KappaParam, tilt: f64, tol: f64) -> Result<Self> {
        let series = SeriesParams::new(p, tilt)?;
        let mut x_max = 8.0f64;
        while series.survival(x_max, tol)? >= TABLE_TAIL_EPS {
            x_max *= 2.0;
            if x_max > 1e9 {
                return Err(Error::convergence(format!(
                    "tilted law at tilt = {tilt} keeps mass beyond x = 1e9"
                )));
            }
        }
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(256);
        let n0 = 129usize;
        let ratio = x_max / X_FLOOR;
        for i in 0..n0 {
            let x = if i == n0 - 1 {
                x_max
            } else {
                X_FLOOR * ratio.powf(i as f64 / (n0 - 1) as f64)
            };
            knots.push((x, cdf_value(&series, x, tol)?));
        }
        loop {
            let mut budget = TABLE_MAX_KNOTS.saturating_sub(knots.len());
            if budget == 0 {
                break;
            }
            let mut refined: Vec<(f64, f64)> = Vec::with_capacity(knots.len() * 2);
            refined.push(knots[0]);
            let mut inserted = false;
            for w in knots.windows(2) {
                let (x0, f0) = w[0];
                let (x1, f1) = w[1];
                if f1 - f0 > TABLE_MAX_DELTA_F && budget > 0 {
                    let xm = 0.5 * (x0 + x1);
                    refined.push((xm, cdf_value(&series, xm, tol)?));
                    budget -= 1;
                    inserted = true;
                }
                refined.push((x1, f1));
            }
            knots = refined;
            if !inserted {
                break;
            }
        }
        let mut xs = Vec::with_capacity(knots.len());
        let mut fs: Vec<f64> = Vec::with_capacity(knots.len());
        for (x, f) in knots {
            let f = fs.last().map_or(f, |&prev: &f64| f.max(prev));
            xs.push(x);
            fs.push(f);
        }
        let f_lo = fs[0];
        let f_hi = *fs.last().unwrap();
        let x_hi = *xs.last().unwrap();
        Ok(CdfTable {
            series,
            tol,
            table: MonotoneCubic::new(xs, fs),
            f_lo,
            x_hi,
            f_hi,
            tail_rate: series.rate(0),
        })
    }

    /// Exact (series) distribution function; valid for x ≥ the floor, where
    /// convergence within the cap was established at build time.
    fn cdf_unchecked(&self, x: f64) -> f64 {
        cdf_value(&self.series, x, self.tol)
            .expect("series convergence holds on the sampling domain")
    }

    fn density_unchecked(&self, x: f64) -> f64 {
        self.series
            .density(x, self.tol)
            .expect("series convergence holds on the sampling domain")
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }

    fn quantile(&self, u: f64) -> f64 {
        if u <= self.f_lo {
            // Mass below the table floor is under 1e-300; the floor itself
            // is the honest answer at double precision.
            return X_FLOOR;
        }
        if u >= self.f_hi {
            // Beyond the table the law is exponential with the exact rate
            // d_0 − tilt up to terms below the build tolerance.
            let guess = self.x_hi + ((1.0 - self.f_hi) / (1.0 - u)).ln() / self.tail_rate;
            let mut lo = self.x_hi;
            let mut hi = guess.max(self.x_hi + 1.0 / self.tail_rate);
            for _ in 0..200 {
                if self.cdf_unchecked(hi) >= u {
                    break;
                }
                lo = hi;
                hi = self.x_hi + 2.0 * (hi - self.x_hi);
            }
            return self.polish(u, guess.clamp(lo, hi), lo, hi);
        }
        let x0 = self.table.invert(u);
        self.polish(u, x0.clamp(X_FLOOR, self.x_hi), X_FLOOR, self.x_hi)
    }

    /// Newton iteration on the exact series CDF with a bisection safeguard,
    /// run to a relative step of 1e-12.
    fn polish(&self, u: f64, mut x: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..60 {
            let fx = self.cdf_unchecked(x);
            if fx > u {
                hi = x;
            } else {
                lo = x;
            }
            let dens = self.density_unchecked(x);
            let mut next = if dens > 0.0 { x - (fx - u) / dens } else { 0.5 * (lo + hi) };
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-12 * next.abs().max(1.0) {
                return next;
            }
            x = next;
        }
        x
    }
}

/// A sampler for the jump law under a fixed exponential tilt.
#[derive(Clone)]
pub struct TiltedSampler {
    param: KappaParam,
    tilt: f64,
    table: CdfTable,
}

impl TiltedSampler {
    pub fn param(&self) -> KappaParam {
        self.param
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    /// One draw from the tilted law by table inversion plus Newton polish.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.table.draw(rng)
    }

    /// Distribution function of the tilted law.
    pub fn cdf(&self, x: f64) -> f64 {
        cdf_value(&self.table.series, x, self.table.tol)
            .expect("series convergence holds on the sampling domain")
    }
}

/// The jump law of the log conformal radius for one κ, with a prebuilt
/// sampling table for the untilted case.
#[derive(Clone)]
pub struct RadiusLaw {
    param: KappaParam,
    density_tolerance: f64,
    base: CdfTable,
}

impl RadiusLaw {
    pub fn new(param: KappaParam) -> Result<Self> {
        Self::with_density_tolerance(param, DEFAULT_DENSITY_TOL)
    }

    /// Override the relative truncation tolerance used by every series
    /// evaluation this law performs.
    pub fn with_density_tolerance(param: KappaParam, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::domain(format!(
                "density tolerance {tol} must lie in (0, 1)"
            )));
        }
        let base = CdfTable::build(param, 0.0, tol)?;
        Ok(RadiusLaw {
            param,
            density_tolerance: tol,
            base,
        })
    }

    pub fn param(&self) -> KappaParam {
        self.param
    }

    /// Below this point `cdf` switches from the series to a clamped cubic.
    pub fn x_floor(&self) -> f64 {
        X_FLOOR
    }

    pub fn density_tolerance(&self) -> f64 {
        self.density_tolerance
    }

    /// The law packaged for the large-deviation machinery.
    pub fn as_mgf(&self) -> MgfSpec {
        self.param.mgf()
    }

    /// E[T] = Λ'(0).
    pub fn mean(&self) -> f64 {
        mean_t(self.param)
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!(
                "density point x = {x} must be positive"
            )));
        }
        self.base.series.density(x, self.density_tolerance)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        cdf_value(&self.base.series, x, self.density_tolerance)
    }

    /// One draw under the exponential tilt `tilt` (`0.0` draws from the law
    /// itself). A nonzero tilt builds a fresh table on every call; loops
    /// should hold a [`TiltedSampler`] from [`RadiusLaw::tilted_sampler`]
    /// instead.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, tilt: f64) -> Result<f64> {
        if tilt == 0.0 {
            Ok(self.base.draw(rng))
        } else {
            Ok(CdfTable::build(self.param, tilt, self.density_tolerance)?.draw(rng))
        }
    }

    /// A reusable sampler for the law tilted by `tilt` < λ_c.
    pub fn tilted_sampler(&self, tilt: f64) -> Result<TiltedSampler> {
        let table = if tilt == 0.0 {
            self.base.clone()
        } else {
            CdfTable::build(self.param, tilt, self.density_tolerance)?
        };
        Ok(TiltedSampler {
            param: self.param,
            tilt,
            table,
        })
    }
}
