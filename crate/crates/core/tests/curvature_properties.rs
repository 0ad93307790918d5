use capillary::curvature::{
    curvature_field, elementary_symmetric, higher_mean, parallel_curvature, pn_derivative, pn_eval, pn_eval_binomial,
};
use capillary::surface::shapes::{ellipsoid, icosphere};
use nalgebra::Vector3;
use proptest::prelude::*;

fn kappas() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..6)
}

proptest! {
    #[test]
    fn pn_product_equals_expansion(k in kappas(), t in -2.0..2.0f64) {
        let a = pn_eval(&k, t);
        let b = pn_eval_binomial(&k, t);
        prop_assert!((a - b).abs() <= 1e-11 * (1.0 + a.abs()));
    }

    #[test]
    fn newton_maclaurin(k in kappas()) {
        // H_1^2 >= H_2 for every real spectrum, and H_1 >= H_2^(1/2) >= ... when all kappa > 0
        let h = higher_mean(&k);
        if k.len() >= 2 {
            prop_assert!(h[1] * h[1] >= h[2] - 1e-12);
        }
        let pos: Vec<f64> = k.iter().map(|x| x.abs() + 0.01).collect();
        let hp = higher_mean(&pos);
        for r in 1..pos.len() {
            prop_assert!(hp[r].powf(1.0 / r as f64) >= hp[r + 1].powf(1.0 / (r + 1) as f64) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn parallel_mean_is_log_derivative(k in prop::collection::vec(0.05..3.0f64, 1..5), t in 0.0..4.0f64) {
        let (kt, h) = parallel_curvature(&k, t).unwrap();
        prop_assert!((h - pn_derivative(&k, t) / pn_eval(&k, t)).abs() <= 1e-12 * h.abs());
        for (a, b) in k.iter().zip(&kt) {
            prop_assert!((b - a / (1.0 + t * a)).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn symmetric_polynomials_scale(k in kappas(), s in 0.1..10.0f64) {
        let e = elementary_symmetric(&k);
        let scaled: Vec<f64> = k.iter().map(|x| x * s).collect();
        let es = elementary_symmetric(&scaled);
        for (r, (a, b)) in e.iter().zip(&es).enumerate() {
            prop_assert!((b - a * s.powi(r as i32)).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn curvature_scales_inversely(s in 0.2..5.0f64) {
        let m = icosphere(3, Vector3::zeros(), 1.0).unwrap();
        let ms = icosphere(3, Vector3::zeros(), s).unwrap();
        let (c, cs) = (curvature_field(&m).unwrap(), curvature_field(&ms).unwrap());
        for (a, b) in c.iter().zip(&cs) {
            prop_assert!((b.mean * s - a.mean).abs() < 1e-9);
        }
    }
}

#[test]
fn sphere_curvature_converges() {
    let errs: Vec<f64> = [3, 4, 5]
        .iter()
        .map(|&d| {
            let c = curvature_field(&icosphere(d, Vector3::zeros(), 2.0).unwrap()).unwrap();
            c.iter().flat_map(|c| c.kappas.iter().map(|k| (k - 0.5).abs())).fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[2] < 1e-3, "{errs:?}");
    assert!(errs[0] > errs[2]);
}

#[test]
fn ellipsoid_tip_curvature() {
    // at (a, 0, 0) both principal curvatures are a / b^2
    let m = ellipsoid(5, [2.0, 1.0, 1.0]).unwrap();
    let v = (0..m.vertex_count()).max_by(|&i, &j| m.vertex(i).x.total_cmp(&m.vertex(j).x)).unwrap();
    let c = curvature_field(&m).unwrap();
    for k in &c[v].kappas {
        assert!((k - 2.0).abs() < 2e-2, "{k}");
    }
}
