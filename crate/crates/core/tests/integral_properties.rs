use std::f64::consts::PI;

use capillary::integrals::{
    area, closed_volume, enclosed_volume, hk_deficit_halfspace, hk_deficit_wedge, hk_refined_closed, minkowski_residual,
    planar_closure, structural_residual,
};
use capillary::surface::shapes::{ellipsoid, icosphere};
use capillary::surface::{generate_cap, perturb};
use capillary::wedge::{ContactAngles, Wedge};
use nalgebra::Vector3;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_caps_are_equality_cases(theta in 0.1..PI - 0.1, radius in 0.2..5.0f64) {
        let w = Wedge::half_space(3).unwrap();
        let s = generate_cap(&w, &ContactAngles::new(vec![theta]).unwrap(), radius, 3).unwrap();
        let r = hk_deficit_halfspace(&s, theta).unwrap();
        prop_assert!(r.relative_deficit.abs() < 1e-12);
        for order in 1..=2 {
            prop_assert!(minkowski_residual(&s, s.k0(), order).unwrap().abs() < 1e-12 * area(&s));
        }
        prop_assert!(structural_residual(&s).unwrap().norm() < 1e-11 * area(&s));
    }

    #[test]
    fn analytic_wedge_caps_are_equality_cases(t1 in 0.3..PI - 0.3, t2 in 0.3..PI - 0.3, alpha in 0.5..PI - 0.5) {
        prop_assume!(capillary::wedge::admissible(t1, t2, alpha, true));
        let w = Wedge::classical(alpha).unwrap();
        let Ok(s) = generate_cap(&w, &ContactAngles::new(vec![t1, t2]).unwrap(), 1.0, 3) else {
            return Ok(());
        };
        let r = hk_deficit_wedge(&s, s.k0()).unwrap();
        prop_assert!(r.relative_deficit.abs() < 1e-10, "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn deficit_is_scale_covariant(lambda in 0.3..4.0f64) {
        let w = Wedge::half_space(3).unwrap();
        let cap = generate_cap(&w, &ContactAngles::new(vec![1.2]).unwrap(), 1.0, 3).unwrap();
        let m = cap.to_mesh_at(3).unwrap();
        let p = perturb(&m, 0.05, 2, 1).unwrap();
        let a = hk_deficit_wedge(&p, p.k0()).unwrap();
        let ps = p.scaled(lambda).unwrap();
        let b = hk_deficit_wedge(&ps, ps.k0()).unwrap();
        prop_assert!((b.deficit - a.deficit * lambda.powi(3)).abs() < 1e-9 * lambda.powi(3));
        prop_assert!((b.relative_deficit - a.relative_deficit).abs() < 1e-9);
    }
}

#[test]
fn mesh_volume_matches_cap_volume() {
    let w = Wedge::classical(PI / 2.0).unwrap();
    let cap = generate_cap(&w, &ContactAngles::new(vec![1.0, 1.3]).unwrap(), 1.0, 3).unwrap();
    let exact = enclosed_volume(&cap).unwrap();
    let m = cap.to_mesh_at(6).unwrap();
    assert!((enclosed_volume(&m).unwrap() - exact).abs() < 1e-3 * exact);
    for c in planar_closure(&m).unwrap() {
        assert!(c.abs() <= 1e-10 * exact);
    }
}

#[test]
fn closed_surfaces() {
    let v = closed_volume(&icosphere(6, Vector3::zeros(), 1.0).unwrap()).unwrap();
    assert!((v - 4.0 * PI / 3.0).abs() < 1e-3);
    let sphere = hk_refined_closed(&icosphere(5, Vector3::new(3.0, 0.0, 0.0), 1.0).unwrap()).unwrap();
    // translation invariant; the weighted flux vanishes on a sphere
    assert!(sphere.report.relative_deficit.abs() < 2e-3);
    assert!(sphere.weighted_flux.norm() < 1e-9);
    let ell = hk_refined_closed(&ellipsoid(5, [1.0, 1.5, 0.8]).unwrap()).unwrap();
    assert!(ell.report.relative_deficit > 1e-2);
}

#[test]
fn perturbation_only_increases_the_deficit() {
    let w = Wedge::half_space(3).unwrap();
    let cap = generate_cap(&w, &ContactAngles::new(vec![PI / 2.0]).unwrap(), 1.0, 3).unwrap();
    let m = cap.to_mesh_at(5).unwrap();
    let base = hk_deficit_wedge(&m, m.k0()).unwrap().deficit;
    for (amp, seed) in [(0.01, 1), (0.03, 2), (0.05, 3)] {
        let p = perturb(&m, amp, 3, seed).unwrap();
        assert!(hk_deficit_wedge(&p, p.k0()).unwrap().deficit > base);
    }
}
