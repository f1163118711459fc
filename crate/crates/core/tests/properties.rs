use std::f64::consts::{PI, TAU};

use drillfill::bounds::{
    drill_geometry_constants, drill_volume_bound, fill_bound_theorem_form, fill_deficit,
    geometry_term_c1, geometry_term_c2,
};
use drillfill::drill::{build_drill_profiles, shell_metric, verify_drill_properties, SamplingPlan};
use drillfill::fill::{
    build_fill_profiles, fill_bump, fill_curvature_defect, solid_torus_from_flat_torus,
    tube_scalar_integral_bound, verify_fill_properties, FlatTorusData,
};
use drillfill::profiles::{bump_derivative_bounds, check_derivatives, make_bump, rescale_bump};
use drillfill::warped::{hyperbolic_tube, hyperbolic_tube_volume};
use drillfill::yamabe::{
    conformal_corpus, conformal_scalar, holder_lower_bound_check, yamabe_quotient, ConformalFactor,
};
use drillfill::{BumpFunction, SmoothProfile, WarpedMetric};
use proptest::prelude::*;

fn drill_eta() -> BumpFunction {
    make_bump(1.0 / 3.0, 2.0 / 3.0).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn bump_is_monotone_and_bounded(x0 in -5.0f64..5.0, w in 0.01f64..10.0) {
        let eta = make_bump(x0, x0 + w).unwrap();
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let x = x0 - 0.5 * w + 2.0 * w * i as f64 / 10_000.0;
            let v = eta.eval(x).value;
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= prev, "η({x}) = {v} < {prev}");
            prev = v;
        }
        prop_assert_eq!(eta.eval(x0).value, 0.0);
        prop_assert_eq!(eta.eval(x0 + w).value, 1.0);
    }

    #[test]
    fn bump_derivatives_within_certified_bounds(x0 in -2.0f64..2.0, w in 0.05f64..4.0) {
        let eta = make_bump(x0, x0 + w).unwrap();
        for i in 0..2000 {
            let j = eta.eval(x0 + w * (i as f64 + 0.5) / 2000.0);
            prop_assert!(j.d1.abs() <= eta.c1 && j.d2.abs() <= eta.c2);
        }
    }

    #[test]
    fn rescaling_law(radius in 0.05f64..1.0) {
        let eta = drill_eta();
        let chi = rescale_bump(&eta, radius).unwrap();
        let (lo, hi) = (radius / 3.0, 2.0 * radius / 3.0);
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        let n = 20_000;
        for i in 0..=n {
            let j = chi.eval(lo + (hi - lo) * i as f64 / n as f64);
            s1 = s1.max(j.d1.abs());
            s2 = s2.max(j.d2.abs());
        }
        // the same probe set in the unit variable
        let (mut u1, mut u2) = (0.0f64, 0.0f64);
        for i in 0..=n {
            let j = eta.eval(1.0 / 3.0 + i as f64 / (3.0 * n as f64));
            u1 = u1.max(j.d1.abs());
            u2 = u2.max(j.d2.abs());
        }
        prop_assert!((s1 * radius / u1 - 1.0).abs() < 1e-6);
        prop_assert!((s2 * radius * radius / u2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn drill_profiles_pass_derivative_check(radius in 0.05f64..=1.0) {
        let p = build_drill_profiles(radius, &drill_eta()).unwrap();
        // The transition has width R/3, so the step scales with R to keep step/R fixed.
        let step = 2e-5 * radius;
        for q in [&p.phi, &p.psi, &p.a_drill, &p.b_drill, &p.chi] {
            let rep = check_derivatives(&q.restrict(0.02, radius + 0.5).unwrap(), step, 1e-6).unwrap();
            prop_assert!(rep.passed(), "R = {radius}: {rep:?}");
        }
    }

    #[test]
    fn fill_profiles_pass_derivative_check(ell1 in 6.5f64..300.0, ell2 in 0.1f64..10.0) {
        let p = build_fill_profiles(ell1, ell2, &fill_bump().unwrap()).unwrap();
        let lo = -p.radius + 0.05;
        for q in [&p.phi, &p.psi, &p.a_fill, &p.b_fill] {
            let rep = check_derivatives(&q.restrict(lo, 0.5).unwrap(), 1e-5, 1e-6).unwrap();
            prop_assert!(rep.passed(), "ell1 = {ell1}: {rep:?}");
        }
    }

    #[test]
    fn curvature_table_symmetry(r in 0.05f64..2.0, s in 0.1f64..3.0, t in 0.0f64..1.0) {
        let a = SmoothProfile::sinh().shifted(t).scaled(s);
        let b = SmoothProfile::exp().scaled(1.0 / s);
        let g = WarpedMetric::new(0.01, 2.5, a.clone(), b.clone(), 1.0, 1.0).unwrap();
        let h = WarpedMetric::new(0.01, 2.5, b, a, 1.0, 1.0).unwrap();
        let (k, m) = (g.sectional_curvatures(r).unwrap(), h.sectional_curvatures(r).unwrap());
        prop_assert_eq!(k.k_r_theta, m.k_r_y);
        prop_assert_eq!(k.k_r_y, m.k_r_theta);
        prop_assert_eq!(k.k_theta_y, m.k_theta_y);
        prop_assert_eq!(k.scalar, 2.0 * (k.k_r_theta + k.k_r_y + k.k_theta_y));
    }

    #[test]
    fn hyperbolicity_detection(lambda in 0.1f64..10.0, mu in 0.1f64..10.0, t in 0.0f64..2.0) {
        let tube = WarpedMetric::new(
            0.0, 3.0,
            SmoothProfile::sinh().shifted(t).scaled(lambda),
            SmoothProfile::cosh().shifted(t).scaled(mu),
            1.0, 1.0,
        ).unwrap();
        let cusp = WarpedMetric::new(
            -3.0, 3.0,
            SmoothProfile::exp().scaled(lambda),
            SmoothProfile::exp().scaled(mu),
            1.0, 1.0,
        ).unwrap();
        for g in [&tube, &cusp] {
            for i in 1..=1000 {
                let r = g.r0() + (g.r1() - g.r0()) * i as f64 / 1001.0;
                let k = g.sectional_curvatures(r).unwrap();
                for v in [k.k_r_theta, k.k_r_y, k.k_theta_y] {
                    prop_assert!((v + 1.0).abs() <= 1e-9, "r = {r}: {v}");
                }
            }
        }
    }

    #[test]
    fn tube_volume_matches_closed_form(ell in 0.01f64..20.0, radius in 0.01f64..3.0) {
        let v = hyperbolic_tube(ell, radius).unwrap().volume(1e-12).unwrap();
        let exact = hyperbolic_tube_volume(ell, radius);
        prop_assert!(((v - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn volume_is_linear_in_periods(p in 0.1f64..10.0, q in 0.1f64..10.0) {
        let unit = WarpedMetric::new(0.0, 1.0, SmoothProfile::exp(), SmoothProfile::cosh(), 1.0, 1.0).unwrap();
        let g = WarpedMetric::new(0.0, 1.0, SmoothProfile::exp(), SmoothProfile::cosh(), p, q).unwrap();
        let (v1, v) = (unit.volume(1e-12).unwrap(), g.volume(1e-12).unwrap());
        prop_assert!((v - p * q * v1).abs() <= 1e-14 * v.abs());
    }

    #[test]
    fn drill_gluing_and_exact_hyperbolicity(radius in 0.05f64..=1.0) {
        let p = build_drill_profiles(radius, &drill_eta()).unwrap();
        let rep = verify_drill_properties(&p, &SamplingPlan::drill(radius, 2000).unwrap());
        prop_assert!(rep.gluing_holds());
        prop_assert!(rep.positivity_holds() && rep.branches_hold());
        prop_assert!(rep.log_consistency < 1e-12);
        // the shell integral only needs the product bound up to r = R
        prop_assert!(rep.product_bound_holds_up_to_radius());
        let g = shell_metric(&p, 1.0, -1.0, radius + 1.0).unwrap();
        for i in 1..400 {
            let r = -1.0 + (radius + 2.0) * i as f64 / 400.0;
            if r < radius / 3.0 || r > 2.0 * radius / 3.0 {
                prop_assert!((g.scalar_curvature(r).unwrap() + 6.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn drill_product_bound_for_large_radius(radius in 0.25f64..=1.0) {
        let p = build_drill_profiles(radius, &drill_eta()).unwrap();
        let rep = verify_drill_properties(&p, &SamplingPlan::drill(radius, 2000).unwrap());
        prop_assert!(rep.product_bound_holds(), "{rep:?}");
    }

    #[test]
    fn fill_profile_properties(ell1 in 6.3f64..1000.0, ell2 in 0.01f64..100.0) {
        let p = build_fill_profiles(ell1, ell2, &fill_bump().unwrap()).unwrap();
        prop_assert!(p.core_residual() < 1e-10);
        let rep = verify_fill_properties(&p, 2000);
        prop_assert!(rep.all_hold(), "{rep:?}");
        for i in 1..200 {
            let r = -p.radius * i as f64 / 200.0;
            if r < -2.0 * p.delta || r > -p.delta {
                prop_assert!(fill_curvature_defect(&p, r).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn fill_defect_independent_of_ell2(ell1 in 6.5f64..500.0, ell2 in 0.01f64..100.0, t in 0.0f64..1.0) {
        let eta = fill_bump().unwrap();
        let p = build_fill_profiles(ell1, ell2, &eta).unwrap();
        let q = build_fill_profiles(ell1, 1.0, &eta).unwrap();
        let r = -p.delta * (1.0 + t);
        prop_assert_eq!(fill_curvature_defect(&p, r).unwrap(), fill_curvature_defect(&q, r).unwrap());
    }

    #[test]
    fn solid_torus_area_consistency(area in 0.1f64..100.0, ell in 6.3f64..200.0, twist in 0.0f64..1.0) {
        let st = solid_torus_from_flat_torus(&FlatTorusData::new(area, ell, twist).unwrap(), &fill_bump().unwrap()).unwrap();
        prop_assert!((st.boundary_area() - area).abs() <= 1e-10 * area);
        prop_assert!(st.smoothness_residual < 1e-10);
    }

    #[test]
    fn constant_conformal_scaling(lambda in prop::sample::select(vec![0.5, 2.0, 10.0]), r in 0.01f64..0.99) {
        let p = build_drill_profiles(0.6, &drill_eta()).unwrap();
        let g = shell_metric(&p, 0.3, 0.0, 1.0).unwrap();
        let s = g.scalar_curvature(r).unwrap();
        let one = ConformalFactor::constant(1.0).unwrap();
        prop_assert_eq!(conformal_scalar(&g, &one, r).unwrap(), s);
        let u = ConformalFactor::constant(lambda).unwrap();
        let scaled = conformal_scalar(&g, &u, r).unwrap() * lambda.powi(4);
        prop_assert!((scaled - s).abs() <= 1e-12 * s.abs());
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn holder_and_quotient_on_random_factors(seed in any::<u64>(), radius in 0.2f64..=1.0, ell in 0.05f64..2.0) {
        let p = build_drill_profiles(radius, &drill_eta()).unwrap();
        let g = shell_metric(&p, ell, 0.0, radius).unwrap();
        for f in conformal_corpus(seed, 4, 0.0, radius).unwrap() {
            let u = f.factor().unwrap();
            let h = holder_lower_bound_check(&g, &u, 1e-10).unwrap();
            prop_assert!(h.holds(), "{h:?}");
            let q = yamabe_quotient(&g, &u, 1e-10).unwrap();
            prop_assert!(q.holds(), "{q:?}");
            prop_assert!(q.quotient >= q.without_gradient);
        }
    }

    #[test]
    fn solid_torus_bound_chain(area in 1.0f64..50.0, ell in 7.0f64..100.0) {
        let eta = fill_bump().unwrap();
        let st = solid_torus_from_flat_torus(&FlatTorusData::new(area, ell, 0.0).unwrap(), &eta).unwrap();
        let t = tube_scalar_integral_bound(&st, 1191.5, 1e-10).unwrap();
        prop_assert!(t.volume_slack() >= -1e-9);
        prop_assert!(t.integral <= (1.0 + t.allowance) * t.volume);
        prop_assert!(t.integral <= t.chain_bound);
    }
}

proptest! {
    #[test]
    fn drill_increment_positive(vol in 0.1f64..100.0, ell in 1e-6f64..10.0, radius in 0.01f64..0.999, c in 0.1f64..500.0) {
        let rep = drill_volume_bound(vol, ell, radius, c).unwrap();
        prop_assert!(rep.increment > 0.0);
        prop_assert!(rep.simplified_value.unwrap() >= rep.bound_value);
    }

    #[test]
    fn fill_deficit_positive_in_validity_region(area in 0.1f64..100.0, c in 0.0f64..2000.0, t in 1e-6f64..100.0) {
        let ell = (c.sqrt() * PI).max(TAU) * (1.0 + t);
        prop_assert!(fill_deficit(area, ell, c) > 0.0);
        let rep = fill_bound_theorem_form(10.0, area, ell, c).unwrap();
        prop_assert!(rep.all_flags_hold());
    }

    #[test]
    fn geometry_terms_are_non_decreasing(a in 1e-4f64..1.0, b in 1e-4f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(geometry_term_c1(lo) <= geometry_term_c1(hi));
        prop_assert!(geometry_term_c2(lo) <= geometry_term_c2(hi));
    }
}

#[test]
fn display_and_simplified_forms_agree_near_unit_radius() {
    let rep = drill_volume_bound(10.0, 0.7, 1.0 - 1e-9, 5.0).unwrap();
    let simplified = rep.simplified_value.unwrap() - 10.0;
    assert!((rep.increment - simplified).abs() <= 1e-7 * simplified);
    let g = drill_geometry_constants();
    assert!(g.monotone);
}

#[test]
fn derivative_bound_sampling_converges() {
    let eta = make_bump(0.0, 1.0).unwrap();
    let (a1, a2) = bump_derivative_bounds(&eta, 1_000).unwrap();
    let (b1, b2) = bump_derivative_bounds(&eta, 100_000).unwrap();
    assert!((a1 / b1 - 1.0).abs() < 0.01);
    assert!((a2 / b2 - 1.0).abs() < 0.01);
}
