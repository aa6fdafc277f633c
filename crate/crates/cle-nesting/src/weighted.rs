//! Weighted nesting: loops carry i.i.d. weights and points are classified
//! by the growth rate of the total weight around them.
//!
//! With weights drawn from a law μ, a point where about νr loops of total
//! weight about αr accumulate by log scale r costs
//!
//! ```text
//! γ(α, ν) = ν·Λ_μ*(α/ν) + ν·Λ_κ*(1/ν),
//! ```
//!
//! and the dimension of the α-level set optimizes out the count density:
//!
//! ```text
//! dim(α) = 2 − inf_ν γ(α, ν),      empty when the infimum exceeds 2.
//! ```
//!
//! Both summands are perspective transforms of convex conjugates, so the
//! objective is convex in ν and the infimum is located by a golden-section
//! search over the feasible interval {ν : α/ν ∈ supp μ}.
//!
//! The flagship special case is κ = 4 with symmetric Bernoulli weights
//! ±σ, σ = √(π/2), which reproduces the thick-point spectrum of the
//! two-dimensional Gaussian free field: the optimal count density has the
//! closed form ν₀(α) = (α/σ)·coth(π²α/σ) and the dimension collapses to
//! max(0, 2 − π²α²/(2σ²)). Those closed forms live here alongside the
//! generic machinery so they can cross-check it.

use std::f64::consts::PI;

use crate::dimension::DimValue;
use crate::error::{Error, Result};
use crate::ext::Extended;
use crate::ldp::{legendre_transform, rate_nu, MgfSpec};
use crate::numeric::{golden_min, le};
use crate::radius_law::KappaParam;

const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// The law of one loop weight: a moment generating function plus, when the
/// law is discrete, the atoms themselves so samplers can draw from it.
#[derive(Clone)]
pub struct WeightLaw {
    mgf: MgfSpec,
    atoms: Option<Vec<(f64, f64)>>,
}

impl WeightLaw {
    /// A finite discrete weight law given as `(value, probability)` atoms.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let mgf = MgfSpec::from_atoms(atoms)?;
        Ok(WeightLaw {
            mgf,
            atoms: Some(atoms.to_vec()),
        })
    }

    /// An analytic weight law described by its cumulant generating
    /// function. The cumulant must vanish at zero, which pins the
    /// normalization of the underlying law.
    pub fn from_mgf(mgf: MgfSpec) -> Result<Self> {
        if !mgf.domain().contains(0.0) {
            return Err(Error::domain(
                "weight-law tilt domain must contain zero",
            ));
        }
        let at_zero = mgf.cumulant(0.0);
        if !(at_zero.abs() <= 1e-12) {
            return Err(Error::domain(format!(
                "weight-law cumulant at zero is {at_zero}, expected 0"
            )));
        }
        Ok(WeightLaw { mgf, atoms: None })
    }

    /// Fair ±σ weights, the law coupling κ = 4 nesting to the Gaussian
    /// free field.
    pub fn symmetric_bernoulli(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "weight scale sigma = {sigma} must be positive and finite"
            )));
        }
        Self::from_atoms(&[(-sigma, 0.5), (sigma, 0.5)])
    }

    pub fn mgf(&self) -> &MgfSpec {
        &self.mgf
    }

    /// The atoms of a discrete law, in construction order; `None` for
    /// analytic laws.
    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        self.atoms.as_deref()
    }

    pub fn support(&self) -> (Extended, Extended) {
        self.mgf.support()
    }
}

/// Parameters of the Gaussian-free-field coupling. `special` records
/// whether σ matches √(π/2), the value at which the κ = 4 weighted gasket
/// is the set of GFF thick points, to within 1e-12 relative.
#[derive(Clone, Copy, Debug)]
pub struct GffParams {
    pub sigma: f64,
    pub special: bool,
}

impl GffParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "sigma = {sigma} must be positive and finite"
            )));
        }
        let pinned = (PI / 2.0).sqrt();
        Ok(GffParams {
            sigma,
            special: (sigma - pinned).abs() <= 1e-12 * sigma,
        })
    }
}

fn joint_positive(
    kmgf: &MgfSpec,
    wmgf: &MgfSpec,
    alpha: f64,
    nu: f64,
) -> Result<Extended> {
    let wpart = legendre_transform(wmgf, alpha / nu)?.value.scale(nu);
    let kpart = rate_nu(kmgf, nu)?;
    Ok(wpart.add(kpart))
}

fn limit_at_zero(kmgf: &MgfSpec, wmgf: &MgfSpec, alpha: f64) -> Result<Extended> {
    let mut prev: Option<f64> = None;
    let mut nu = 1.0;
    for _ in 1..=60 {
        nu *= 0.5;
        match joint_positive(kmgf, wmgf, alpha, nu)? {
            Extended::PosInf => return Ok(Extended::PosInf),
            Extended::NegInf => unreachable!("nesting rates are nonnegative"),
            Extended::Finite(v) => {
                if v >= DIVERGENCE_THRESHOLD {
                    return Ok(Extended::PosInf);
                }
                if let Some(pv) = prev {
                    if (v - pv).abs() <= 1e-10 * v.abs().max(1.0) {
                        return Ok(Extended::Finite(v));
                    }
                }
                prev = Some(v);
            }
        }
    }
    Err(Error::convergence(
        "joint nesting rate did not settle along nu -> 0",
    ))
}

/// The joint rate γ(α, ν) = ν·Λ_μ*(α/ν) + ν·Λ_κ*(1/ν). At ν = 0 the
/// boundary value is the ν → 0 limit: λ_c when α = 0, and otherwise the
/// extrapolated limit along ν = 2^(−k) (infinite when that diverges).
pub fn gamma_joint(p: KappaParam, w: &WeightLaw, alpha: f64, nu: f64) -> Result<Extended> {
    if !alpha.is_finite() {
        return Err(Error::domain(format!(
            "weight density alpha = {alpha} must be finite"
        )));
    }
    if !(nu >= 0.0) {
        return Err(Error::domain(format!("nu = {nu} must be nonnegative")));
    }
    let kmgf = p.mgf();
    if nu == 0.0 {
        if alpha == 0.0 {
            return Ok(Extended::Finite(p.lambda_crit()));
        }
        return limit_at_zero(&kmgf, w.mgf(), alpha);
    }
    joint_positive(&kmgf, w.mgf(), alpha, nu)
}

/// The feasible count-density interval {ν > 0 : α/ν ∈ supp μ} as a lower
/// endpoint plus an optional finite upper endpoint, or `None` when the
/// weight support cannot produce density α at all.
fn feasible_interval(
    support: (Extended, Extended),
    alpha: f64,
) -> Option<(f64, Option<f64>)> {
    use Extended::*;
    let (a, b) = support;
    if alpha > 0.0 {
        let lo = match b {
            Finite(b) if b <= 0.0 => return None,
            NegInf => return None,
            Finite(b) => alpha / b,
            PosInf => 0.0,
        };
        let hi = match a {
            Finite(a) if a > 0.0 => Some(alpha / a),
            _ => None,
        };
        Some((lo, hi))
    } else if alpha < 0.0 {
        let lo = match a {
            Finite(a) if a >= 0.0 => return None,
            PosInf => return None,
            Finite(a) => alpha / a,
            NegInf => 0.0,
        };
        let hi = match b {
            Finite(b) if b < 0.0 => Some(alpha / b),
            _ => None,
        };
        Some((lo, hi))
    } else {
        unreachable!("alpha = 0 is dispatched on the conjugate at zero instead")
    }
}

/// Minimizes ν ↦ γ(α, ν) and returns (ν₀, γ(α, ν₀)).
///
/// When no count density can realize α (weights of the wrong sign), the
/// level set is unreachable: the result is (0, +∞). When α = 0 and the
/// weight support misses zero, the optimum collapses to the ν → 0
/// boundary value (0, λ_c). Otherwise a golden-section search (tolerance
/// 1e-10 in ν) runs over the feasible interval, its endpoints pulled
/// inward by a relative 1e-12 to dodge boundary singularities; unbounded
/// intervals are first capped by doubling until the objective turns
/// upward, which convexity guarantees it does.
pub fn minimize_nu(p: KappaParam, w: &WeightLaw, alpha: f64) -> Result<(f64, Extended)> {
    if !alpha.is_finite() {
        return Err(Error::domain(format!(
            "weight density alpha = {alpha} must be finite"
        )));
    }
    let kmgf = p.mgf();
    let wmgf = w.mgf();
    let (lo, hi_opt) = if alpha == 0.0 {
        // A zero weight density is free exactly when the weight law can
        // linger near zero; otherwise the optimum collapses to the ν = 0
        // boundary, whose cost is the plain ν → 0 rate λ_c.
        match legendre_transform(wmgf, 0.0)?.value {
            Extended::Finite(_) => (0.0, None),
            _ => return Ok((0.0, Extended::Finite(p.lambda_crit()))),
        }
    } else {
        match feasible_interval(w.support(), alpha) {
            Some(interval) => interval,
            None => return Ok((0.0, Extended::PosInf)),
        }
    };
    let g = |nu: f64| -> Extended {
        match joint_positive(&kmgf, wmgf, alpha, nu) {
            Ok(v) => v,
            Err(_) => Extended::PosInf,
        }
    };
    if let Some(hi) = hi_opt {
        if hi - lo <= 2e-12 * hi.abs().max(1.0) {
            // Point-mass weights force ν = α/v exactly.
            return Ok((lo, gamma_joint(p, w, alpha, lo)?));
        }
    }
    let hi = match hi_opt {
        Some(h) => h,
        None => {
            let nu_t = 1.0 / crate::radius_law::mean_t(p);
            let mut h = (lo.max(nu_t).max(alpha.abs()) + 1.0) * 2.0;
            let mut gh = g(h);
            for _ in 0..80 {
                let g2 = g(2.0 * h);
                if !le(g2, gh) {
                    break;
                }
                h *= 2.0;
                gh = g2;
            }
            2.0 * h
        }
    };
    let pad = 1e-12 * (hi - lo);
    let (nu0, gamma0) = golden_min(g, lo + pad, hi - pad, 1e-10);
    Ok((nu0, gamma0))
}

/// dim(α) = 2 − inf_ν γ(α, ν) when that infimum is at most 2; `Empty`
/// otherwise.
pub fn dim_weighted(p: KappaParam, w: &WeightLaw, alpha: f64) -> Result<DimValue> {
    let (_, gamma) = minimize_nu(p, w, alpha)?;
    Ok(match gamma {
        Extended::Finite(v) if v <= 2.0 => DimValue::Dim((2.0 - v).max(0.0)),
        _ => DimValue::Empty,
    })
}

/// Closed-form thick-point dimension max(0, 2 − π²α²/(2σ²)) of the
/// Gaussian free field coupled at κ = 4 with ±σ weights.
pub fn gff_dim_closed(g: GffParams, alpha: f64) -> f64 {
    (2.0 - PI * PI * alpha * alpha / (2.0 * g.sigma * g.sigma)).max(0.0)
}

/// The optimal count density behind an α-thick point at the pinned scale
/// σ = √(π/2):
///
/// ```text
/// ν₀(α) = (α/σ)·coth(π²α/σ),        ν₀(0) = 1/π²,
/// ```
///
/// defined for |α| ≤ √(2/π), the thickness beyond which the level set is
/// empty. Near α = 0 the even expansion 1/π² + 2πα²/3 takes over to avoid
/// the 0/0.
pub fn gff_nu_profile(alpha: f64) -> Result<f64> {
    let s0 = (PI / 2.0).sqrt();
    let a_max = (2.0 / PI).sqrt();
    if !(alpha.abs() <= a_max) {
        return Err(Error::domain(format!(
            "thickness alpha = {alpha} is outside [-{a_max}, {a_max}]"
        )));
    }
    let x = PI * PI * alpha / s0;
    if x.abs() < 1e-4 {
        return Ok(1.0 / (PI * PI) + 2.0 * PI * alpha * alpha / 3.0);
    }
    Ok((alpha / s0) / x.tanh())
}

/// The saddle point (η*, λ*) = (π²α/σ², −π²α²/(2σ²)) of the joint tilt
/// problem behind an α-thick point: the weight tilt η* and radius tilt λ*
/// satisfy Λ_μ(η*) + Λ₄(λ*) = 0 with Λ_μ'(η*) = α/ν₀ and Λ₄'(λ*) = 1/ν₀.
/// α = 0 has no saddle (the typical point needs no tilting).
pub fn gff_saddle(g: GffParams, alpha: f64) -> Result<(f64, f64)> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "saddle point requires a nonzero finite thickness, got {alpha}"
        )));
    }
    let s2 = g.sigma * g.sigma;
    let eta = PI * PI * alpha / s2;
    let lam = -PI * PI * alpha * alpha / (2.0 * s2);
    Ok((eta, lam))
}

/// The κ = 4 radius-law cumulant in closed form,
///
/// ```text
/// Λ₄(λ) = −ln cos(π√(2λ))   for 0 ≤ λ < 1/8,
///         −ln cosh(π√(−2λ)) for λ < 0,
/// ```
///
/// matching the general-κ expression specialized to κ = 4, where the
/// critical tilt is exactly 1/8.
pub fn lambda_4(lam: f64) -> Result<f64> {
    if !(lam < 0.125) {
        return Err(Error::domain(format!(
            "tilt {lam} is not below the critical tilt 0.125"
        )));
    }
    if lam >= 0.0 {
        Ok(-(PI * (2.0 * lam).sqrt()).cos().ln())
    } else {
        Ok(-(PI * (-2.0 * lam).sqrt()).cosh().ln())
    }
}
