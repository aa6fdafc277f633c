//! Large-deviation primitives.
//!
//! A law enters this module as a cumulant generating function (log moment
//! generating function) together with its finiteness domain and the support
//! of the underlying variable:
//!
//! ```text
//! Λ(λ) = log E[e^{λX}],   finite on the open interval (λ_lo, λ_hi),
//! Λ*(x) = sup_λ { λx − Λ(λ) }   (Fenchel-Legendre conjugate).
//! ```
//!
//! `legendre_transform` evaluates Λ* with an explicit account of where the
//! supremum is attained: at an interior stationary point, at a finite domain
//! endpoint (the affine extension for heavy-tailed laws), or only in the
//! limit |λ| → ∞. `rate_nu` and `cramer_interval_rate` specialize the
//! conjugate to first-passage counts of a positive renewal sequence: for
//! ν > 0 the count rate is ν·Λ*(1/ν), and the large-r exponential rate of
//! P[ν₁ r ≤ N_r ≤ ν₂ r] is the infimum of that rate over [ν₁, ν₂].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::Extended;
use crate::numeric::{scan_then_refine, solve_bracketed, ternary_min};

/// Relative tolerance on the stationarity residual |Λ'(λ*) − x|.
const STATIONARITY_TOL: f64 = 1e-10;
/// Objective threshold past which the supremum is declared divergent.
const DIVERGENCE_THRESHOLD: f64 = 1e6;
/// Relative step used by the central-difference fallback derivative.
const FD_STEP: f64 = 1e-6;

fn scale_of(x: f64) -> f64 {
    x.abs().max(1.0)
}

/// Open interval of tilt values on which a cumulant generating function is
/// finite. `None` marks an unbounded side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltDomain {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl TiltDomain {
    /// The whole real line.
    pub fn all() -> Self {
        TiltDomain { lo: None, hi: None }
    }

    /// Bounded above by `hi`, unbounded below.
    pub fn below(hi: f64) -> Self {
        TiltDomain { lo: None, hi: Some(hi) }
    }

    pub fn contains(&self, lam: f64) -> bool {
        self.lo.map_or(true, |lo| lam > lo) && self.hi.map_or(true, |hi| lam < hi)
    }

    fn is_empty(&self) -> bool {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => lo >= hi,
            _ => false,
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A cumulant generating function with its domain and the support of the
/// underlying law. The support endpoints bound the range of Λ', which is
/// what decides whether the conjugate at `x` is finite.
#[derive(Clone)]
pub struct MgfSpec {
    eval: ScalarFn,
    deriv: Option<ScalarFn>,
    domain: TiltDomain,
    support: (Extended, Extended),
}

impl MgfSpec {
    pub fn new(
        domain: TiltDomain,
        support: (Extended, Extended),
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MgfSpec {
            eval: Arc::new(eval),
            deriv: None,
            domain,
            support,
        }
    }

    /// Attach an analytic derivative. Without one, a central difference with
    /// step `1e-6·max(1, |λ|)` is used and the usable domain shrinks by the
    /// step at each finite endpoint.
    pub fn with_deriv(mut self, deriv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn domain(&self) -> TiltDomain {
        self.domain
    }

    pub fn support(&self) -> (Extended, Extended) {
        self.support
    }

    pub fn has_analytic_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    /// Λ(λ). The caller is responsible for staying inside the domain.
    pub fn cumulant(&self, lam: f64) -> f64 {
        (self.eval)(lam)
    }

    /// Λ'(λ), analytic when provided, otherwise a central difference whose
    /// stencil is clamped inside the domain.
    pub fn cumulant_deriv(&self, lam: f64) -> f64 {
        if let Some(d) = &self.deriv {
            return d(lam);
        }
        let mut h = FD_STEP * scale_of(lam);
        if let Some(hi) = self.domain.hi {
            h = h.min(0.5 * (hi - lam).max(f64::MIN_POSITIVE));
        }
        if let Some(lo) = self.domain.lo {
            h = h.min(0.5 * (lam - lo).max(f64::MIN_POSITIVE));
        }
        ((self.eval)(lam + h) - (self.eval)(lam - h)) / (2.0 * h)
    }

    /// Gap kept between probe points and a finite domain endpoint.
    fn edge_gap(&self, endpoint: f64) -> f64 {
        let base = if self.deriv.is_some() { 1e-12 } else { 2.0 * FD_STEP };
        base * scale_of(endpoint)
    }

    /// The standard Gaussian law: Λ(λ) = λ²/2 on the whole line.
    pub fn standard_gaussian() -> Self {
        MgfSpec::new(
            TiltDomain::all(),
            (Extended::NegInf, Extended::PosInf),
            |lam| 0.5 * lam * lam,
        )
        .with_deriv(|lam| lam)
    }

    /// A finite discrete law given as `(value, probability)` atoms.
    ///
    /// Probabilities must be positive and sum to 1 within 1e-12. Both the
    /// cumulant and its derivative are evaluated in shifted (log-sum-exp)
    /// form, so arbitrarily large tilts stay finite.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("atom list is empty"));
        }
        let mut total = 0.0;
        for &(v, p) in atoms {
            if !v.is_finite() {
                return Err(Error::domain(format!("atom value {v} is not finite")));
            }
            if !(p > 0.0) {
                return Err(Error::domain(format!(
                    "atom probability {p} must be positive"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "atom probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        let lo = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        let hi = atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
        let owned: Vec<(f64, f64)> = atoms.to_vec();
        let owned2 = owned.clone();
        Ok(MgfSpec::new(
            TiltDomain::all(),
            (Extended::Finite(lo), Extended::Finite(hi)),
            move |lam| {
                let m = owned.iter().map(|a| lam * a.0).fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = owned.iter().map(|&(v, p)| p * (lam * v - m).exp()).sum();
                m + s.ln()
            },
        )
        .with_deriv(move |lam| {
            let m = owned2.iter().map(|a| lam * a.0).fold(f64::NEG_INFINITY, f64::max);
            let mut num = 0.0;
            let mut den = 0.0;
            for &(v, p) in &owned2 {
                let w = p * (lam * v - m).exp();
                num += v * w;
                den += w;
            }
            num / den
        }))
    }
}

/// Where the supremum of λx − Λ(λ) is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Maximizer {
    /// Interior stationary point: Λ'(λ*) = x within tolerance.
    Interior(f64),
    /// Attained at a finite domain endpoint (affine extension branch).
    Boundary(f64),
    /// Attained only in the limit |λ| → ∞ (off-support point, or a support
    /// endpoint reached asymptotically).
    Divergent,
}

/// Value and maximizer of the Fenchel-Legendre conjugate at one point.
#[derive(Clone, Copy, Debug)]
pub struct ConjugateResult {
    /// Λ*(x) in [0, +inf].
    pub value: Extended,
    pub maximizer: Maximizer,
}

fn interior_result(mgf: &MgfSpec, lam: f64, x: f64) -> ConjugateResult {
    let mut value = lam * x - mgf.cumulant(lam);
    // The conjugate is nonnegative whenever 0 is in the tilt domain; shave
    // off rounding noise so callers can rely on it.
    if value < 0.0 && value > -1e-12 {
        value = 0.0;
    }
    ConjugateResult {
        value: Extended::Finite(value),
        maximizer: Maximizer::Interior(lam),
    }
}

/// Fenchel-Legendre conjugate Λ*(x) = sup over the domain of λx − Λ(λ).
///
/// Strategy: the objective's derivative x − Λ'(λ) is monotone decreasing, so
/// the stationary point is found by expanding a bracket for Λ'(λ) = x and
/// solving to `|Λ'(λ*) − x| ≤ 1e-10·max(1, |x|)`. Points strictly outside
/// the support yield `+inf`. When Λ' never reaches `x` on a domain bounded
/// by a finite `λ_hi` with Λ finite there, the supremum sits at the endpoint
/// and the affine extension `x·λ_hi − Λ(λ_hi⁻)` is returned (divergence of Λ
/// at the endpoint is probed at `λ_hi − 1e-8·scale` against a 1e6 threshold;
/// for half-infinite domains the probe scale falls back to max(1, |λ_hi|)).
/// On an unbounded side the expansion either saturates (support endpoint,
/// finite conjugate) or grows past the 1e6 threshold (`+inf`).
pub fn legendre_transform(mgf: &MgfSpec, x: f64) -> Result<ConjugateResult> {
    if !x.is_finite() {
        return Err(Error::domain(format!("conjugate point {x} is not finite")));
    }
    let dom = mgf.domain();
    if dom.is_empty() {
        return Err(Error::domain("tilt domain is empty"));
    }
    let (a, b) = mgf.support();
    let xe = Extended::Finite(x);
    if xe < a || xe > b {
        return Ok(ConjugateResult {
            value: Extended::PosInf,
            maximizer: Maximizer::Divergent,
        });
    }

    let tol_g = STATIONARITY_TOL * scale_of(x);
    let start = if dom.contains(0.0) {
        0.0
    } else {
        match (dom.lo, dom.hi) {
            (Some(lo), Some(hi)) => 0.5 * (lo + hi),
            (Some(lo), None) => lo + scale_of(lo),
            (None, Some(hi)) => hi - scale_of(hi),
            (None, None) => unreachable!("contains(0) holds for the full line"),
        }
    };
    let g = |lam: f64| mgf.cumulant_deriv(lam) - x;
    let g_start = g(start);
    if g_start.abs() <= tol_g {
        return Ok(interior_result(mgf, start, x));
    }

    if g_start < 0.0 {
        // Λ'(start) < x: search to the right.
        match dom.hi {
            Some(hi) => expand_toward_finite_hi(mgf, x, start, g_start, hi, tol_g),
            None => expand_unbounded(mgf, x, start, g_start, tol_g, true),
        }
    } else {
        match dom.lo {
            Some(lo) => expand_toward_finite_lo(mgf, x, start, g_start, lo, tol_g),
            None => expand_unbounded(mgf, x, start, g_start, tol_g, false),
        }
    }
}

fn expand_toward_finite_hi(
    mgf: &MgfSpec,
    x: f64,
    start: f64,
    g_start: f64,
    hi: f64,
    tol_g: f64,
) -> Result<ConjugateResult> {
    let gap = mgf.edge_gap(hi);
    let g = |lam: f64| mgf.cumulant_deriv(lam) - x;
    let mut prev = start;
    let mut g_prev = g_start;
    let mut delta = hi - start;
    for _ in 0..70 {
        delta *= 0.5;
        let cand = hi - delta;
        if cand - prev <= 0.0 || hi - cand < gap {
            break;
        }
        let gc = g(cand);
        if !gc.is_finite() || gc >= 0.0 {
            // Bracket found (a non-finite derivative close to a blow-up
            // endpoint counts as +inf).
            let root = if gc.is_finite() && gc.abs() <= tol_g {
                cand
            } else if gc.is_finite() {
                solve_bracketed(g, prev, cand, g_prev, gc, tol_g, 200)?
            } else {
                // Re-bracket by bisection between prev and cand on finiteness.
                let mut lo_l = prev;
                let mut hi_l = cand;
                let mut f_lo = g_prev;
                for _ in 0..200 {
                    let mid = 0.5 * (lo_l + hi_l);
                    let gm = g(mid);
                    if gm.is_finite() && gm < 0.0 {
                        lo_l = mid;
                        f_lo = gm;
                    } else {
                        hi_l = mid;
                    }
                    if let Some(r) = try_finish(g, lo_l, hi_l, f_lo, tol_g) {
                        return Ok(interior_result(mgf, r, x));
                    }
                }
                return Err(Error::convergence(
                    "stationary point lost between finite and blown-up derivative values",
                ));
            };
            return Ok(interior_result(mgf, root, x));
        }
        prev = cand;
        g_prev = gc;
    }
    // Λ' stayed below x all the way to the endpoint: decide between a
    // divergent Λ (cannot happen together with bounded Λ', probe anyway)
    // and the affine extension.
    let probe_scale = 1e-8
        * match mgf.domain().lo {
            Some(lo) => (hi - lo).abs(),
            None => scale_of(hi),
        };
    let at_probe = mgf.cumulant(hi - probe_scale);
    if !at_probe.is_finite() || at_probe >= DIVERGENCE_THRESHOLD {
        return Err(Error::convergence(
            "cumulant diverges at the domain endpoint yet its derivative stayed bounded",
        ));
    }
    Ok(ConjugateResult {
        value: Extended::Finite(x * hi - at_probe),
        maximizer: Maximizer::Boundary(hi),
    })
}

fn expand_toward_finite_lo(
    mgf: &MgfSpec,
    x: f64,
    start: f64,
    g_start: f64,
    lo: f64,
    tol_g: f64,
) -> Result<ConjugateResult> {
    let gap = mgf.edge_gap(lo);
    let g = |lam: f64| mgf.cumulant_deriv(lam) - x;
    let mut prev = start;
    let mut g_prev = g_start;
    let mut delta = start - lo;
    for _ in 0..70 {
        delta *= 0.5;
        let cand = lo + delta;
        if prev - cand <= 0.0 || cand - lo < gap {
            break;
        }
        let gc = g(cand);
        if !gc.is_finite() || gc <= 0.0 {
            let root = if gc.is_finite() && gc.abs() <= tol_g {
                cand
            } else if gc.is_finite() {
                solve_bracketed(g, cand, prev, gc, g_prev, tol_g, 200)?
            } else {
                let mut lo_l = cand;
                let mut hi_l = prev;
                let mut f_hi = g_prev;
                for _ in 0..200 {
                    let mid = 0.5 * (lo_l + hi_l);
                    let gm = g(mid);
                    if gm.is_finite() && gm > 0.0 {
                        hi_l = mid;
                        f_hi = gm;
                    } else {
                        lo_l = mid;
                    }
                    if let Some(r) = try_finish(g, lo_l, hi_l, f_hi, tol_g) {
                        return Ok(interior_result(mgf, r, x));
                    }
                }
                return Err(Error::convergence(
                    "stationary point lost between finite and blown-up derivative values",
                ));
            };
            return Ok(interior_result(mgf, root, x));
        }
        prev = cand;
        g_prev = gc;
    }
    let probe_scale = 1e-8
        * match mgf.domain().hi {
            Some(hi) => (hi - lo).abs(),
            None => scale_of(lo),
        };
    let at_probe = mgf.cumulant(lo + probe_scale);
    if !at_probe.is_finite() || at_probe >= DIVERGENCE_THRESHOLD {
        return Err(Error::convergence(
            "cumulant diverges at the domain endpoint yet its derivative stayed bounded",
        ));
    }
    Ok(ConjugateResult {
        value: Extended::Finite(x * lo - at_probe),
        maximizer: Maximizer::Boundary(lo),
    })
}

fn try_finish(g: impl Fn(f64) -> f64, lo: f64, hi: f64, f_inside: f64, tol_g: f64) -> Option<f64> {
    if f_inside.abs() <= tol_g {
        return Some(if f_inside >= 0.0 { hi } else { lo });
    }
    if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.is_finite() && gm.abs() <= tol_g {
            return Some(mid);
        }
    }
    None
}

fn expand_unbounded(
    mgf: &MgfSpec,
    x: f64,
    start: f64,
    g_start: f64,
    tol_g: f64,
    rightward: bool,
) -> Result<ConjugateResult> {
    let g = |lam: f64| mgf.cumulant_deriv(lam) - x;
    let objective = |lam: f64| lam * x - mgf.cumulant(lam);
    // A point exactly on a finite support endpoint is only reached in the
    // λ → ±∞ limit: Λ' stays strictly inside the support at every finite
    // tilt, so an apparent crossing there is rounding noise and the real
    // answer comes from the objective's saturation or divergence.
    let endpoint_target = match (rightward, mgf.support()) {
        (true, (_, Extended::Finite(b))) => b == x,
        (false, (Extended::Finite(a), _)) => a == x,
        _ => false,
    };
    let mut prev = start;
    let mut g_prev = g_start;
    let mut obj_prev = objective(start);
    let mut step = scale_of(start).max(scale_of(x));
    for _ in 0..120 {
        let cand = if rightward { prev + step } else { prev - step };
        let gc = g(cand);
        let crossed = if rightward { gc >= 0.0 } else { gc <= 0.0 };
        if !endpoint_target && gc.is_finite() && crossed {
            let (blo, bhi, flo, fhi) = if rightward {
                (prev, cand, g_prev, gc)
            } else {
                (cand, prev, gc, g_prev)
            };
            let root = if gc.abs() <= tol_g {
                cand
            } else {
                solve_bracketed(g, blo, bhi, flo, fhi, tol_g, 200)?
            };
            return Ok(interior_result(mgf, root, x));
        }
        let obj = objective(cand);
        if !gc.is_finite() || !obj.is_finite() {
            // The user-supplied cumulant overflowed before a decision was
            // reached; fall back on the objective trend seen so far.
            break;
        }
        if obj >= DIVERGENCE_THRESHOLD {
            return Ok(ConjugateResult {
                value: Extended::PosInf,
                maximizer: Maximizer::Divergent,
            });
        }
        if (obj - obj_prev).abs() <= 1e-12 * scale_of(obj) {
            // The objective saturated: x is a support endpoint reached in
            // the limit (for atoms, Λ*(max atom) = −log of its mass).
            return Ok(ConjugateResult {
                value: Extended::Finite(obj.max(0.0)),
                maximizer: Maximizer::Divergent,
            });
        }
        obj_prev = obj;
        prev = cand;
        g_prev = gc;
        step *= 2.0;
    }
    // No stationary point, no saturation, no clean divergence within the
    // expansion budget: treat the supremum as infinite, which is the correct
    // reading for objectives that keep growing (for example logarithmically
    // at a continuous support endpoint).
    Ok(ConjugateResult {
        value: Extended::PosInf,
        maximizer: Maximizer::Divergent,
    })
}

/// Nesting-rate specialization ν·Λ*(1/ν) for a positive renewal step law.
///
/// `rate_nu(mgf, 0)` returns the supremum of the tilt domain as an extended
/// real, matching the ν → 0 limit of the rate along the curve.
pub fn rate_nu(mgf: &MgfSpec, nu: f64) -> Result<Extended> {
    if !(nu >= 0.0) {
        return Err(Error::domain(format!("nu = {nu} must be nonnegative")));
    }
    if nu == 0.0 {
        return Ok(match mgf.domain().hi {
            Some(hi) => Extended::Finite(hi),
            None => Extended::PosInf,
        });
    }
    Ok(legendre_transform(mgf, 1.0 / nu)?.value.scale(nu))
}

/// Exponential decay rate of P[ν₁ r ≤ N_r ≤ ν₂ r] for the first-passage
/// count N_r of a positive renewal sequence with step cumulant `mgf`:
/// the infimum of ν·Λ*(1/ν) over [ν₁, ν₂].
///
/// The known zero at ν = 1/Λ'(0) is short-circuited when it lies inside the
/// window; otherwise a coarse scan (which also pins both endpoints) feeds a
/// ternary search run to relative tolerance 1e-10.
pub fn cramer_interval_rate(mgf: &MgfSpec, nu1: f64, nu2: f64) -> Result<Extended> {
    if !(nu1 > 0.0 && nu2 >= nu1) {
        return Err(Error::domain(format!(
            "window [{nu1}, {nu2}] must satisfy 0 < nu1 <= nu2"
        )));
    }
    if mgf.domain().contains(0.0) {
        let mean = mgf.cumulant_deriv(0.0);
        if mean > 0.0 {
            let nu_star = 1.0 / mean;
            if (nu1..=nu2).contains(&nu_star) {
                return Ok(Extended::Finite(0.0));
            }
        }
    }
    let f = |nu: f64| rate_nu(mgf, nu).unwrap_or(Extended::PosInf);
    if nu2 == nu1 {
        return Ok(f(nu1));
    }
    let (_, v) = scan_then_refine(&f, nu1, nu2, 65, |g, a, b| ternary_min(g, a, b, 1e-10));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli_pm1() -> MgfSpec {
        MgfSpec::from_atoms(&[(1.0, 0.5), (-1.0, 0.5)]).unwrap()
    }

    #[test]
    fn gaussian_conjugate_is_half_square() {
        let g = MgfSpec::standard_gaussian();
        for &x in &[-3.0, -0.7, 0.0, 0.2, 1.0, 4.5] {
            let r = legendre_transform(&g, x).unwrap();
            let v = r.value.expect_finite("gaussian conjugate");
            assert!(
                (v - 0.5 * x * x).abs() < 1e-9,
                "conjugate at {x}: {v} vs {}",
                0.5 * x * x
            );
            match r.maximizer {
                Maximizer::Interior(l) => {
                    assert!((l - x).abs() < 1e-8, "maximizer {l} should be {x}")
                }
                other => panic!("expected interior maximizer, got {other:?}"),
            }
        }
    }

    #[test]
    fn bernoulli_conjugate_matches_entropy_form() {
        // For values x in (-1, 1) the conjugate is the binary entropy form
        // ((1+x)/2) log(1+x) + ((1-x)/2) log(1-x).
        let m = bernoulli_pm1();
        for &x in &[-0.9f64, -0.5, 0.0, 0.25, 0.5, 0.8] {
            let expected = if x == 0.0 {
                0.0
            } else {
                0.5 * (1.0 + x) * (1.0 + x).ln() + 0.5 * (1.0 - x) * (1.0 - x).ln()
            };
            let got = legendre_transform(&m, x)
                .unwrap()
                .value
                .expect_finite("bernoulli conjugate");
            assert!(
                (got - expected).abs() < 1e-9,
                "x = {x}: {got} vs {expected}"
            );
        }
        // Frozen midpoint value, cross-checked against a grid supremum.
        let mid = legendre_transform(&m, 0.5)
            .unwrap()
            .value
            .expect_finite("bernoulli at 0.5");
        assert!((mid - 0.130812).abs() < 1e-6, "midpoint value {mid}");
    }

    #[test]
    fn bernoulli_conjugate_matches_grid_supremum() {
        // Independent evaluation: two-stage grid supremum of λx − Λ(λ).
        let m = bernoulli_pm1();
        let x = 0.5;
        let obj = |lam: f64| lam * x - m.cumulant(lam);
        let mut best_l = -20.0;
        let mut best = f64::NEG_INFINITY;
        let mut lam = -20.0;
        while lam <= 20.0 {
            let v = obj(lam);
            if v > best {
                best = v;
                best_l = lam;
            }
            lam += 1e-3;
        }
        let mut lam = best_l - 2e-3;
        while lam <= best_l + 2e-3 {
            best = best.max(obj(lam));
            lam += 1e-6;
        }
        let got = legendre_transform(&m, x)
            .unwrap()
            .value
            .expect_finite("bernoulli at 0.5");
        assert!(
            (got - best).abs() < 1e-6,
            "solver {got} vs grid supremum {best}"
        );
    }

    #[test]
    fn off_support_points_are_infinite() {
        let m = bernoulli_pm1();
        for &x in &[1.5, -1.0001, 7.0] {
            let r = legendre_transform(&m, x).unwrap();
            assert_eq!(r.value, Extended::PosInf, "x = {x}");
            assert_eq!(r.maximizer, Maximizer::Divergent);
        }
    }

    #[test]
    fn support_endpoint_of_atoms_gives_log_mass() {
        // Λ*(max atom) = −log p(max atom), attained only as λ → ∞.
        let m = MgfSpec::from_atoms(&[(2.0, 0.25), (0.0, 0.75)]).unwrap();
        let r = legendre_transform(&m, 2.0).unwrap();
        let v = r.value.expect_finite("endpoint conjugate");
        assert!(
            (v - 0.25f64.ln().abs()).abs() < 1e-9,
            "got {v}, expected -log 0.25 = {}",
            -(0.25f64.ln())
        );
        assert_eq!(r.maximizer, Maximizer::Divergent);
    }

    #[test]
    fn degenerate_point_mass_has_zero_rate_at_its_atom() {
        let m = MgfSpec::from_atoms(&[(1.0, 1.0)]).unwrap();
        let r = legendre_transform(&m, 1.0).unwrap();
        assert_eq!(r.value, Extended::Finite(0.0));
        assert_eq!(r.maximizer, Maximizer::Interior(0.0));
        let off = legendre_transform(&m, 1.01).unwrap();
        assert_eq!(off.value, Extended::PosInf);
    }

    #[test]
    fn affine_extension_branch_is_exercised() {
        // Synthetic cumulant with a finite value and bounded derivative at
        // the finite domain endpoint λ_hi = 1:
        //   Λ(λ) = (1−λ)^{3/2} − 1 + (3/2)λ,  Λ(0) = 0, Λ' = 3/2 − (3/2)√(1−λ),
        // so Λ'(1⁻) = 3/2 and Λ(1⁻) = 1/2. Declaring unbounded support makes
        // every x > 3/2 land on the affine extension x·1 − 1/2.
        let m = MgfSpec::new(
            TiltDomain::below(1.0),
            (Extended::NegInf, Extended::PosInf),
            |lam| (1.0 - lam).powf(1.5) - 1.0 + 1.5 * lam,
        )
        .with_deriv(|lam| 1.5 - 1.5 * (1.0 - lam).sqrt());
        for &x in &[2.0, 3.0, 10.0] {
            let r = legendre_transform(&m, x).unwrap();
            let v = r.value.expect_finite("affine branch");
            assert!(
                (v - (x - 0.5)).abs() < 1e-6,
                "x = {x}: {v} vs {}",
                x - 0.5
            );
            assert_eq!(r.maximizer, Maximizer::Boundary(1.0));
        }
        // Below the boundary slope the stationary point is interior.
        let r = legendre_transform(&m, 1.0).unwrap();
        assert!(matches!(r.maximizer, Maximizer::Interior(_)));
        let v = r.value.expect_finite("interior");
        // sup of λ + (3/2)λ − (1−λ)^{3/2} + 1 ... cross-check numerically.
        let mut best = f64::NEG_INFINITY;
        let mut lam = -50.0;
        while lam < 1.0 {
            best = best.max(lam * 1.0 - m.cumulant(lam));
            lam += 1e-4;
        }
        assert!((v - best).abs() < 1e-6, "interior value {v} vs grid {best}");
    }

    #[test]
    fn empty_domain_is_rejected() {
        let m = MgfSpec::new(
            TiltDomain { lo: Some(1.0), hi: Some(1.0) },
            (Extended::NegInf, Extended::PosInf),
            |_| 0.0,
        );
        assert!(matches!(
            legendre_transform(&m, 0.3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rate_nu_at_zero_reports_domain_top() {
        let g = MgfSpec::standard_gaussian();
        assert_eq!(rate_nu(&g, 0.0).unwrap(), Extended::PosInf);
        let m = MgfSpec::new(
            TiltDomain::below(0.25),
            (Extended::Finite(0.0), Extended::PosInf),
            |lam| -(1.0 - 4.0 * lam).ln() * 0.25,
        );
        assert_eq!(rate_nu(&m, 0.0).unwrap(), Extended::Finite(0.25));
    }

    #[test]
    fn interval_rate_short_circuits_on_the_typical_window() {
        // Exponential(1): Λ(λ) = −log(1−λ), mean 1, so ν_typ = 1.
        let m = MgfSpec::new(
            TiltDomain::below(1.0),
            (Extended::Finite(0.0), Extended::PosInf),
            |lam: f64| -(1.0 - lam).ln(),
        )
        .with_deriv(|lam| 1.0 / (1.0 - lam));
        let r = cramer_interval_rate(&m, 0.5, 1.5).unwrap();
        assert_eq!(r, Extended::Finite(0.0));
    }

    #[test]
    fn interval_rate_picks_the_near_endpoint_for_one_sided_windows() {
        // For the exponential law the rate ν·Λ*(1/ν) = ν·(1/ν − 1 − log(1/ν))
        // is increasing above ν_typ = 1, so the window minimum sits at the
        // left endpoint.
        let m = MgfSpec::new(
            TiltDomain::below(1.0),
            (Extended::Finite(0.0), Extended::PosInf),
            |lam: f64| -(1.0 - lam).ln(),
        )
        .with_deriv(|lam| 1.0 / (1.0 - lam));
        let direct = rate_nu(&m, 2.0).unwrap().expect_finite("rate at 2");
        let window = cramer_interval_rate(&m, 2.0, 3.0)
            .unwrap()
            .expect_finite("window rate");
        assert!(
            (window - direct).abs() <= 1e-9 * direct.max(1.0),
            "window rate {window} vs endpoint rate {direct}"
        );
    }

    #[test]
    fn interval_rate_rejects_bad_windows() {
        let g = MgfSpec::standard_gaussian();
        assert!(cramer_interval_rate(&g, 0.0, 1.0).is_err());
        assert!(cramer_interval_rate(&g, 2.0, 1.0).is_err());
    }
}
