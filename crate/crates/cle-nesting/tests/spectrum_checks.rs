//! Cross-module checks of the dimension spectrum: the parametric form of
//! the rate curve against direct conjugation, closed-form second
//! derivatives, moment-generating-function quadrature ties, the curve
//! constructors, the weighted profile at kappa = 4, and property-based
//! sweeps of the whole admissible kappa range.

use cle_nesting::dimension::{
    dim_phi, gamma_nu, gasket_dim, nu_max, nu_typical, second_derivative_check,
    curve_parametric, default_lambda_grid, DimValue, NestingCurve,
};
use cle_nesting::ldp::rate_nu;
use cle_nesting::quad::adaptive_simpson;
use cle_nesting::radius_law::{density_t, lambda_kappa, KappaParam, RadiusLaw};
use cle_nesting::weighted::{
    dim_weighted, gamma_joint, gff_dim_closed, gff_nu_profile, gff_saddle, minimize_nu,
    GffParams, WeightLaw,
};
use cle_nesting::Extended;
use proptest::prelude::*;

fn kp(kappa: f64) -> KappaParam {
    KappaParam::new(kappa).unwrap()
}

fn finite(e: Extended, what: &str) -> f64 {
    e.finite().unwrap_or_else(|| panic!("{what} should be finite, got {e:?}"))
}

#[test]
fn parametric_and_direct_conjugation_agree() {
    // The closed form (1/Λ'(λ), λ − Λ(λ)/Λ'(λ)) must retrace the conjugation
    // engine's γ(ν) everywhere; disagreement here is the canary for a bug in
    // either path.
    for kappa in [3.0, 4.0, 6.0] {
        let p = kp(kappa);
        let grid = default_lambda_grid(p, 200);
        assert_eq!(grid.len(), 200);
        for (nu, gamma_par) in curve_parametric(p, &grid).unwrap() {
            let direct = finite(gamma_nu(p, nu).unwrap(), "interior rate");
            assert!(
                (direct - gamma_par).abs() <= 1e-8,
                "kappa {kappa}, nu {nu}: direct {direct} vs parametric {gamma_par}"
            );
        }
    }
}

#[test]
fn curve_second_derivative_is_positive_on_the_default_grid() {
    for kappa in [3.0, 4.0, 6.0] {
        let p = kp(kappa);
        for lam in default_lambda_grid(p, 200) {
            let d2 = second_derivative_check(p, lam).unwrap();
            assert!(
                d2 > 0.0,
                "kappa {kappa}, lambda {lam}: second derivative {d2} not positive"
            );
        }
    }
}

#[test]
fn density_quadrature_reproduces_the_cumulant() {
    // ∫ e^{λx} f_T(x) dx = e^{Λ(λ)} ties the density series to the closed
    // form of the cumulant for every admissible tilt.
    for kappa in [3.0, 16.0 / 3.0] {
        let p = kp(kappa);
        let law = RadiusLaw::new(p).unwrap();
        let lc = p.lambda_crit();
        for lam in [-2.0, -0.5, 0.3 * lc, 0.8 * lc] {
            let want = lambda_kappa(p, lam).unwrap().exp();
            // The integrand decays like e^{-(λ_c - λ)x}; size the domain so
            // the dropped tail is far below the comparison tolerance.
            let hi = 30.0 / (lc - lam) + 40.0;
            let f = |x: f64| (lam * x).exp() * density_t(p, x).unwrap();
            let got = adaptive_simpson(&f, law.x_floor(), hi, 1e-12 * want);
            assert!(
                ((got - want) / want).abs() < 1e-6,
                "kappa {kappa}, lambda {lam}: quadrature {got} vs exp(cumulant) {want}"
            );
        }
    }
}

#[test]
fn curve_constructor_satisfies_the_advertised_invariants() {
    let p = kp(6.0);
    let curve = NestingCurve::from_lambda_grid(p, &default_lambda_grid(p, 512)).unwrap();

    assert_eq!(curve.points.len(), 512);
    let g_typ = finite(gamma_nu(p, curve.nu_typical).unwrap(), "rate at nu_typ");
    assert!(g_typ.abs() <= 1e-9, "gamma(nu_typical) = {g_typ}");
    let g_max = finite(gamma_nu(p, curve.nu_max).unwrap(), "rate at nu_max");
    assert!((g_max - 2.0).abs() <= 1e-9, "gamma(nu_max) = {g_max}");

    // The grid accumulates at λ_c, so the first point sits essentially at
    // the ν → 0 endpoint where the dimension equals the gasket dimension.
    let first = curve.points.first().unwrap();
    let d0 = first.dim.value().expect("the nu -> 0 endpoint is nonempty");
    assert!(
        (d0 - curve.gasket_dim).abs() <= 1e-6,
        "dim at nu = {} is {d0} vs gasket {}",
        first.nu,
        curve.gasket_dim
    );

    // Strict convexity of γ along the sampled points.
    for w in curve.points.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let left = (b.gamma - a.gamma) / (b.nu - a.nu);
        let right = (c.gamma - b.gamma) / (c.nu - b.nu);
        assert!(
            right - left > -1e-8,
            "divided differences fall at nu = {}: {left} then {right}",
            b.nu
        );
    }

    // The spectrum rises to 2 at nu_typical and falls back to 0 at nu_max;
    // beyond nu_max every point is Empty.
    for w in curve.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        match (a.dim, b.dim) {
            (DimValue::Dim(da), DimValue::Dim(db)) => {
                if b.nu <= curve.nu_typical {
                    assert!(db >= da - 1e-12, "spectrum dips below nu_typ at {}", b.nu);
                } else if a.nu >= curve.nu_typical {
                    assert!(db <= da + 1e-12, "spectrum rises above nu_typ at {}", b.nu);
                }
            }
            (DimValue::Empty, DimValue::Dim(_)) => {
                panic!("nonempty point at nu = {} after an empty one", b.nu)
            }
            _ => {}
        }
    }
    assert!(curve.points.iter().any(|q| q.dim.is_empty()));
}

#[test]
fn both_curve_constructors_sample_the_same_function() {
    let p = kp(6.0);
    let lam_curve = NestingCurve::from_lambda_grid(p, &default_lambda_grid(p, 64)).unwrap();
    let nus: Vec<f64> = lam_curve.points.iter().map(|q| q.nu).collect();
    let nu_curve = NestingCurve::from_nu_grid(p, &nus).unwrap();
    for (a, b) in lam_curve.points.iter().zip(nu_curve.points.iter()) {
        assert_eq!(a.nu, b.nu);
        assert!(
            (a.gamma - b.gamma).abs() <= 1e-10,
            "constructors disagree at nu = {}: {} vs {}",
            a.nu,
            a.gamma,
            b.gamma
        );
    }
}

#[test]
fn rate_extends_continuously_to_zero_density() {
    // For a law whose tilt domain is bounded above, γ(ν) → λ_c as ν → 0,
    // which is exactly the ν = 0 value the rate function reports.
    let p = kp(6.0);
    let mgf = p.mgf();
    let at_zero = finite(rate_nu(&mgf, 0.0).unwrap(), "rate at 0");
    assert_eq!(at_zero, p.lambda_crit());
    let mut last = f64::INFINITY;
    for k in [2, 4, 6, 8] {
        let nu = 10f64.powi(-k);
        let gap = (finite(rate_nu(&mgf, nu).unwrap(), "rate near 0") - at_zero).abs();
        assert!(gap < last, "gap {gap} at nu = 1e-{k} did not shrink");
        last = gap;
    }
    assert!(last < 1e-5, "gap at nu = 1e-8 is still {last}");
}

#[test]
fn gff_profile_agrees_with_the_generic_machinery() {
    // At kappa = 4 with symmetric Bernoulli weights at the special scale,
    // three independent routes to the weighted rate must coincide: the
    // generic minimizer, the closed-form dimension, and the saddle point.
    let p = kp(4.0);
    let sigma = (std::f64::consts::PI / 2.0).sqrt();
    let g = GffParams::new(sigma).unwrap();
    let w = WeightLaw::symmetric_bernoulli(sigma).unwrap();
    let alpha_max = (2.0 / std::f64::consts::PI).sqrt();

    for i in 1..50 {
        let alpha = alpha_max * i as f64 / 50.0;

        let closed = gff_dim_closed(g, alpha);
        let generic = dim_weighted(p, &w, alpha)
            .unwrap()
            .value()
            .expect("inside the existence range");
        assert!(
            (generic - closed).abs() <= 1e-6,
            "alpha {alpha}: dim {generic} vs closed form {closed}"
        );

        let (nu0, gmin) = minimize_nu(p, &w, alpha).unwrap();
        let profile = gff_nu_profile(alpha).unwrap();
        assert!(
            (nu0 - profile).abs() <= 1e-6,
            "alpha {alpha}: minimizer {nu0} vs closed profile {profile}"
        );

        let (eta, lam) = gff_saddle(g, alpha).unwrap();
        let saddle_rate = eta * alpha + lam;
        let min_rate = finite(gmin, "minimized joint rate");
        assert!(
            (saddle_rate - min_rate).abs() <= 1e-6,
            "alpha {alpha}: saddle rate {saddle_rate} vs minimum {min_rate}"
        );
    }
}

#[test]
fn gff_profile_endpoints_tie_to_the_unweighted_constants() {
    let p = kp(4.0);
    let at_zero = gff_nu_profile(0.0).unwrap();
    assert!(
        (at_zero - nu_typical(p)).abs() <= 1e-12,
        "profile at 0 is {at_zero} vs nu_typical {}",
        nu_typical(p)
    );
    // At the edge of the existence range the weighted dimension hits zero:
    // the joint rate reaches 2 exactly where the unweighted rate would at
    // nu_max. The profile endpoint itself, (2/pi) coth(2 pi) = 0.63662,
    // stays strictly below the unweighted ceiling nu_max = 0.71071, since
    // conditioning on extreme weights costs rate at every nu.
    let alpha_max = (2.0 / std::f64::consts::PI).sqrt();
    let at_edge = gff_nu_profile(alpha_max).unwrap();
    let sigma = (std::f64::consts::PI / 2.0).sqrt();
    let w = WeightLaw::symmetric_bernoulli(sigma).unwrap();
    let (nu0, gmin) = minimize_nu(p, &w, alpha_max).unwrap();
    assert!(
        (at_edge - nu0).abs() <= 1e-6,
        "profile endpoint {at_edge} vs minimizer {nu0}"
    );
    let g = finite(gmin, "joint rate at the existence edge");
    assert!((g - 2.0).abs() <= 1e-6, "joint rate at alpha_max is {g}");
    let cap = nu_max(p).unwrap();
    assert!(
        at_edge < cap,
        "profile endpoint {at_edge} must stay below nu_max {cap}"
    );
}

#[test]
fn unit_point_mass_reduces_the_joint_rate_to_the_plain_one() {
    let p = kp(6.0);
    let unit = WeightLaw::from_atoms(&[(1.0, 1.0)]).unwrap();
    for nu in [0.05, nu_typical(p), 0.3, 0.7] {
        let joint = gamma_joint(p, &unit, nu, nu).unwrap();
        let plain = gamma_nu(p, nu).unwrap();
        assert_eq!(joint, plain, "reduction at nu = {nu}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rate_is_nonnegative_and_dimension_is_bounded(
        kappa in 2.7f64..7.9,
        nu in 0.001f64..1.2,
    ) {
        let p = kp(kappa);
        match gamma_nu(p, nu).unwrap() {
            Extended::Finite(g) => prop_assert!(g >= -1e-10, "negative rate {g}"),
            Extended::PosInf => {}
            Extended::NegInf => prop_assert!(false, "rate cannot be -inf"),
        }
        match dim_phi(p, nu).unwrap() {
            DimValue::Dim(d) => prop_assert!((0.0..=2.0).contains(&d), "dim {d}"),
            DimValue::Empty => prop_assert!(nu > nu_typical(p)),
        }
    }

    #[test]
    fn rate_vanishes_only_at_the_typical_density(kappa in 2.7f64..7.9) {
        let p = kp(kappa);
        let nt = nu_typical(p);
        let at_typ = gamma_nu(p, nt).unwrap().finite().unwrap();
        prop_assert!(at_typ.abs() <= 1e-9, "gamma(nu_typ) = {at_typ}");
        for factor in [0.5, 0.8, 1.25, 2.0] {
            let g = gamma_nu(p, nt * factor).unwrap().finite().unwrap();
            prop_assert!(g > 1e-6, "gamma({} nu_typ) = {g} too small", factor);
        }
    }

    #[test]
    fn rate_is_convex_in_nu(
        kappa in 2.7f64..7.9,
        center in 0.05f64..0.8,
        span in 0.01f64..0.5,
    ) {
        let p = kp(kappa);
        let xs = [center, center + span, center + 2.0 * span];
        let mut gs = [0.0; 3];
        for (g, x) in gs.iter_mut().zip(xs) {
            *g = gamma_nu(p, x).unwrap().finite().unwrap();
        }
        let left = (gs[1] - gs[0]) / span;
        let right = (gs[2] - gs[1]) / span;
        prop_assert!(
            right - left >= -1e-8,
            "slopes fall: {left} then {right} at kappa {kappa}, center {center}"
        );
    }

    #[test]
    fn nu_max_sits_on_the_increasing_branch(kappa in 2.7f64..7.9) {
        let p = kp(kappa);
        let cap = nu_max(p).unwrap();
        prop_assert!(cap > nu_typical(p));
        let g = gamma_nu(p, cap).unwrap().finite().unwrap();
        prop_assert!((g - 2.0).abs() <= 1e-9, "gamma(nu_max) = {g}");
        prop_assert!(dim_phi(p, cap * 1.01).unwrap().is_empty());
    }

    #[test]
    fn weighted_dimension_is_symmetric_for_symmetric_weights(
        sigma in 0.4f64..2.0,
        alpha in 0.05f64..0.5,
    ) {
        let p = kp(4.0);
        let w = WeightLaw::symmetric_bernoulli(sigma).unwrap();
        let plus = dim_weighted(p, &w, alpha).unwrap();
        let minus = dim_weighted(p, &w, -alpha).unwrap();
        match (plus, minus) {
            (DimValue::Dim(a), DimValue::Dim(b)) => {
                prop_assert!((a - b).abs() <= 1e-9, "asymmetry: {a} vs {b}")
            }
            (DimValue::Empty, DimValue::Empty) => {}
            other => prop_assert!(false, "mixed emptiness {other:?}"),
        }
    }
}
