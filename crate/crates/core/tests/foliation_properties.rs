use std::f64::consts::PI;

use capillary::curvature::curvature_sphere;
use capillary::foliation::{
    am_gm_gap, classify_touch, edge_predicates, first_touch_interior, sample_interior, volume_chain, zeta, zeta_jacobian,
    TouchClass, BRACKET_TOL,
};
use capillary::surface::{generate_cap, perturb};
use capillary::wedge::{ContactAngles, Wedge};
use nalgebra::Vector3;
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-3)
        .prop_map(|(x, y, z)| Vector3::new(x, y, z).normalize())
}

fn sine_bounded() -> impl Strategy<Value = f64> {
    (0.0..PI).prop_filter("sine >= 1e-3", |a: &f64| a.sin() >= 1e-3)
}

proptest! {
    #[test]
    fn jacobian_nonnegative_on_time_domain(
        k in prop::collection::vec(0.01..5.0f64, 2),
        nu in unit(),
        dir in unit(),
        len in 0.0..1.0f64,
        frac in 0.0..1.0f64,
    ) {
        let kmax = k.iter().copied().fold(0.0, f64::max);
        let t = frac / kmax;
        prop_assert!(zeta_jacobian(&k, &nu, &(dir * len), t) >= -1e-12);
    }

    #[test]
    fn am_gm_kernel(k in prop::collection::vec(0.01..5.0f64, 1..5), frac in 0.0..1.0f64) {
        let kmax = k.iter().copied().fold(0.0, f64::max);
        prop_assert!(am_gm_gap(&k, frac / kmax) >= -1e-12);
    }

    #[test]
    fn edge_comparison_matches_polynomial_sign(
        t1 in sine_bounded(), t2 in sine_bounded(), e1 in sine_bounded(), e2 in sine_bounded(), a in sine_bounded()
    ) {
        let p = edge_predicates(t1, t2, e1, e2, a).unwrap();
        let scale = e1.sin() * t1.sin() * a.sin();
        prop_assert!(((p.t_ball1 - p.t_surface1) * scale - p.first_polynomial).abs() < 1e-9 * (1.0 + p.first_polynomial.abs()));
        prop_assert_eq!(p.first_plane, p.first_polynomial >= 0.0 || (p.t_ball1 - p.t_surface1).abs() < 1e-12);
    }

    #[test]
    fn zeta_at_time_one_is_the_base_point(theta in 0.2..PI - 0.2, s in 0.0..1.0f64) {
        let w = Wedge::half_space(3).unwrap();
        let cap = generate_cap(&w, &ContactAngles::new(vec![theta]).unwrap(), 1.0, 3).unwrap();
        let c = cap.as_cap().unwrap();
        let arc = &c.arcs()[0];
        let x = arc.point(arc.s0 + s * (arc.s1 - arc.s0));
        let z = zeta(&cap, &x, 1.0, cap.k0()).unwrap();
        prop_assert!(z.norm() < 1e-12);
        let nu = curvature_sphere(&c.center, c.radius, &x).unwrap().normal;
        prop_assert!(zeta_jacobian(&[1.0, 1.0], &nu, &cap.k0().vec3(), 1.0).abs() < 1e-15);
    }
}

#[test]
fn first_touch_brackets_and_lands_on_parallel_map() {
    let w = Wedge::half_space(3).unwrap();
    let cap = generate_cap(&w, &ContactAngles::new(vec![2.0]).unwrap(), 1.0, 3).unwrap();
    let mesh = cap.to_mesh_at(4).unwrap();
    let p = perturb(&mesh, 0.05, 2, 3).unwrap();
    for s in [&cap, &mesh, &p] {
        for y in sample_interior(s, 25, 11).unwrap() {
            let ev = first_touch_interior(&y, s.k0(), s).unwrap();
            assert!(ev.gap < BRACKET_TOL * s.diameter() * 2.0, "{}", ev.gap);
            assert!(ev.residual < 1e-6 * s.diameter());
            assert!(ev.r0 <= ev.t_max + 1e-6);
        }
    }
}

#[test]
fn edge_touch_on_quarter_sphere_has_surface_angles() {
    let w = Wedge::classical(PI / 2.0).unwrap();
    let s = generate_cap(&w, &ContactAngles::new(vec![PI / 2.0, PI / 2.0]).unwrap(), 1.0, 3).unwrap();
    // seeds on the edge line touch where the edge meets the cap
    let mut ev = first_touch_interior(&Vector3::new(0.5, 1e-7, 1e-7), s.k0(), &s).unwrap();
    classify_touch(&mut ev, &s).unwrap();
    assert!(matches!(ev.class, TouchClass::Interior | TouchClass::Edge | TouchClass::Face(_)));
    assert!(!ev.violation);
}

#[test]
fn volume_chain_is_ordered_on_meshes() {
    for theta in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let w = Wedge::half_space(3).unwrap();
        let cap = generate_cap(&w, &ContactAngles::new(vec![theta]).unwrap(), 1.0, 3).unwrap();
        let exact = volume_chain(&cap, cap.k0(), 1e-12).unwrap();
        assert!(exact.ordered && (exact.volume - exact.hk_bound).abs() < 1e-12);
        let p = perturb(&cap.to_mesh_at(5).unwrap(), 0.05, 2, 7).unwrap();
        let c = volume_chain(&p, p.k0(), 1e-3 * exact.volume).unwrap();
        assert!(c.ordered, "{c:?}");
    }
}
