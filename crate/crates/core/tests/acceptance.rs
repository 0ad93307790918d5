//! Acceptance suite: ten end-to-end criteria at their stated tolerances.
//!
//! Runs as a plain binary so every criterion prints exactly one PASS/FAIL
//! line, in order, with its measured values and wall time.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use capillary::curvature::{parallel_curvature, pn_derivative, pn_eval};
use capillary::foliation::{edge_predicates, elliptic_point, sweepout_coverage, zeta, zeta_jacobian};
use capillary::integrals::{area, hk_deficit_wedge, hk_refined_closed, minkowski_residual};
use capillary::surface::shapes::{ellipsoid, icosphere};
use capillary::surface::{generate_cap, perturb, CapillarySurface};
use capillary::wedge::{admissible, k0_norm_closed_form, solve_k0, CapillaryVector, ContactAngles, Wedge};
use nalgebra::Vector3;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TIME_LIMIT: Duration = Duration::from_secs(60);
const DEPTHS: [usize; 3] = [4, 5, 6];

type Outcome = Result<String, String>;

struct Family {
    name: &'static str,
    wedge: Wedge,
    angles: ContactAngles,
    /// Perturbation amplitude and angular mode; the mode is the highest one
    /// (at most 3) keeping the family strictly mean convex at amplitude 0.05.
    amplitude: f64,
    mode: u32,
}

fn halfspace(theta: f64, mode: u32, name: &'static str) -> Family {
    Family {
        name,
        wedge: Wedge::half_space(3).unwrap(),
        angles: ContactAngles::new(vec![theta]).unwrap(),
        amplitude: 0.05,
        mode,
    }
}

fn wedge(t1: f64, t2: f64, alpha: f64, name: &'static str, amplitude: f64) -> Family {
    Family {
        name,
        wedge: Wedge::classical(alpha).unwrap(),
        angles: ContactAngles::new(vec![t1, t2]).unwrap(),
        amplitude,
        mode: 2,
    }
}

fn halfspace_families() -> Vec<Family> {
    vec![
        halfspace(PI / 3.0, 2, "theta0=pi/3"),
        halfspace(PI / 2.0, 3, "theta0=pi/2"),
        halfspace(2.0 * PI / 3.0, 3, "theta0=2pi/3"),
    ]
}

fn wedge_families() -> Vec<Family> {
    vec![
        wedge(PI / 2.0, PI / 2.0, PI / 2.0, "quarter sphere", 0.05),
        wedge(PI / 3.0, PI / 3.0, PI / 2.0, "(pi/3,pi/3,pi/2)", 0.002),
    ]
}

fn all_families() -> Vec<Family> {
    let mut f = halfspace_families();
    f.extend(wedge_families());
    f
}

impl Family {
    fn cap(&self) -> CapillarySurface {
        generate_cap(&self.wedge, &self.angles, 1.0, 3).unwrap()
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

/// Relative deficits at depths 4, 5, 6 and whether they pass the equality
/// tolerances: `< 1e-2` at the finest depth and decreasing.
fn deficit_ladder(f: &Family) -> (Vec<f64>, bool) {
    let cap = f.cap();
    let d: Vec<f64> = DEPTHS
        .iter()
        .map(|&l| {
            let m = cap.to_mesh_at(l).unwrap();
            hk_deficit_wedge(&m, m.k0()).unwrap().relative_deficit
        })
        .collect();
    let ok = d[2].abs() < 1e-2 && d[0].abs() > d[1].abs() && d[1].abs() > d[2].abs();
    (d, ok)
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for f in halfspace_families() {
        let (d, pass) = deficit_ladder(&f);
        ok &= pass;
        detail.push(format!("{}: {:.2e}/{:.2e}/{:.2e}", f.name, d[0], d[1], d[2]));
    }
    for (theta, both) in [(PI / 2.0, PI), (2.0 * PI / 3.0, 27.0 * PI / 16.0)] {
        let s = halfspace(theta, 2, "").cap();
        let r = hk_deficit_wedge(&s, s.k0()).unwrap();
        let pass = rel_close(r.hk_integral, both, 1e-12) && rel_close(r.volume_term, both, 1e-12);
        ok &= pass;
        detail.push(format!("analytic theta0={theta:.4}: {:.15} vs {:.15}", r.hk_integral, r.volume_term));
    }
    verdict(ok, detail.join("; "))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for f in wedge_families() {
        let (d, pass) = deficit_ladder(&f);
        ok &= pass;
        detail.push(format!("{}: {:.2e}/{:.2e}/{:.2e}", f.name, d[0], d[1], d[2]));
        let s = f.cap();
        let r = hk_deficit_wedge(&s, s.k0()).unwrap();
        ok &= r.relative_deficit.abs() < 1e-12;
        detail.push(format!("analytic {}: rel {:.1e}", f.name, r.relative_deficit));
    }
    let q = wedge_families().remove(0).cap();
    let r = hk_deficit_wedge(&q, q.k0()).unwrap();
    let pass = rel_close(r.hk_integral, PI / 2.0, 1e-12) && rel_close(r.volume_term, PI / 2.0, 1e-12);
    ok &= pass;
    detail.push(format!("quarter sphere sides {:.15} {:.15}", r.hk_integral, r.volume_term));
    verdict(ok, detail.join("; "))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for f in halfspace_families() {
        let cap = f.cap();
        let mut ratios = Vec::new();
        for &l in &DEPTHS {
            let m = cap.to_mesh_at(l).unwrap();
            let exact = hk_deficit_wedge(&m, m.k0()).unwrap().deficit;
            let p = perturb(&m, f.amplitude, f.mode, 7).unwrap();
            let pert = hk_deficit_wedge(&p, p.k0()).unwrap().deficit;
            ok &= pert > 3.0 * exact.abs();
            ratios.push(pert / exact.abs());
        }
        detail.push(format!("{}: ratios {:.1}/{:.1}/{:.1}", f.name, ratios[0], ratios[1], ratios[2]));
    }
    verdict(ok, detail.join("; "))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut disagree, mut banded, mut worst) = (0usize, 0usize, 0.0f64);
    for _ in 0..10_000 {
        let (t1, t2, a) = (PI * rng.random::<f64>(), PI * rng.random::<f64>(), PI * rng.random::<f64>());
        let (Ok(w), Ok(ang)) = (Wedge::classical(a), ContactAngles::new(vec![t1, t2])) else {
            continue;
        };
        let closed = k0_norm_closed_form(t1, t2, a).unwrap();
        let solved = solve_k0(&w, &ang).unwrap().norm().powi(2);
        worst = worst.max((solved - closed).abs() / closed);
        let margin = (a - (PI - (t1 + t2)).abs()).min(PI - (t1 - t2).abs() - a);
        if margin.abs() <= 1e-10 || (closed - 1.0).abs() <= 1e-10 {
            banded += 1;
            continue;
        }
        if admissible(t1, t2, a, true) != (closed <= 1.0) {
            disagree += 1;
        }
    }
    verdict(disagree == 0 && worst < 1e-12, format!("disagreements {disagree} (band {banded}), max rel err |k0|^2 {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for f in all_families() {
        let cap = f.cap();
        let mut res = [[0.0; 3]; 2];
        for (i, &l) in DEPTHS.iter().enumerate() {
            let m = cap.to_mesh_at(l).unwrap();
            let a = area(&m);
            for r in 1..=2 {
                res[r - 1][i] = minkowski_residual(&m, m.k0(), r).unwrap().abs() / a;
            }
        }
        for (r, v) in res.iter().enumerate() {
            ok &= v[2] < 1e-2 && v[0] >= 2.0 * v[1] && v[1] >= 2.0 * v[2];
            detail.push(format!("{} r={}: {:.1e}/{:.1e}/{:.1e}", f.name, r + 1, v[0], v[1], v[2]));
        }
    }
    let hemi = halfspace(PI / 2.0, 2, "").cap();
    let m1 = minkowski_residual(&hemi, hemi.k0(), 1).unwrap();
    ok &= m1 == 0.0;
    detail.push(format!("analytic hemisphere r=1: {m1:e}"));
    verdict(ok, detail.join("; "))
}

/// Curvature of the parallel curve of a circle of curvature `k` at offset
/// `t`, by Richardson-extrapolated central differences of
/// `y(s) = x(s) + t n(s)`.
fn offset_curvature_fd(k: f64, t: f64) -> f64 {
    let y = |s: f64| {
        let (sn, cs) = (k * s).sin_cos();
        // x(s) = sin(ks)/k e − (1 − cos ks)/k ν, n(s) = sin(ks) e + cos(ks) ν
        Vector3::new(sn / k + t * sn, -(1.0 - cs) / k + t * cs, 0.0)
    };
    let curv = |h: f64| {
        let d1 = (y(h) - y(-h)) / (2.0 * h);
        let d2 = (y(h) - y(0.0) * 2.0 + y(-h)) / (h * h);
        -d2.y / d1.norm_squared()
    };
    let h = 1e-2 / k.abs();
    (4.0 * curv(h / 2.0) - curv(h)) / 3.0
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_h, mut worst_k, mut worst_j) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let n = 2 + (rng.random::<f64>() * 3.0) as usize;
        let kappas: Vec<f64> = (0..n).map(|_| 0.05 + 2.95 * rng.random::<f64>()).collect();
        let t = 5.0 * rng.random::<f64>();
        let (kt, h) = parallel_curvature(&kappas, t).unwrap();
        let step = 1e-4 * (1.0 + t);
        let dp = (pn_eval(&kappas, t + step) - pn_eval(&kappas, t - step)) / (2.0 * step);
        let p = pn_eval(&kappas, t);
        worst_h = worst_h.max((h - dp / p).abs() / h.abs());
        worst_h = worst_h.max((h - pn_derivative(&kappas, t) / p).abs() / h.abs());
        for (k, ki) in kappas.iter().zip(&kt) {
            worst_k = worst_k.max((ki - offset_curvature_fd(*k, t)).abs() / ki.abs());
        }
    }
    // ζ-Jacobian against the finite-difference determinant over an
    // orthonormal tangent frame and the time direction
    for f in all_families() {
        let s = f.cap();
        let cap = s.as_cap().unwrap().clone();
        let k0 = s.k0().vec3();
        for _ in 0..200 {
            let x = loop {
                let d = Vector3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                if d.norm() < 1e-3 {
                    continue;
                }
                let x = cap.center + d.normalize() * cap.radius;
                if cap.contains(&x) {
                    break x;
                }
            };
            let nu = (x - cap.center) / cap.radius;
            let (e1, e2) = capillary::curvature::tangent_basis(&nu);
            let t = 0.95 * rng.random::<f64>() * cap.radius + 1e-3;
            let on = |a: f64, b: f64| cap.center + (nu + e1 * a + e2 * b).normalize() * cap.radius;
            let z = |a: f64, b: f64, tt: f64| zeta(&s, &on(a, b), tt, s.k0()).unwrap();
            let h = 1e-6;
            // ∂/∂a of on(a, 0) at 0 is R e1
            let c1 = (z(h, 0.0, t) - z(-h, 0.0, t)) / (2.0 * h * cap.radius);
            let c2 = (z(0.0, h, t) - z(0.0, -h, t)) / (2.0 * h * cap.radius);
            let c3 = (z(0.0, 0.0, t + h) - z(0.0, 0.0, t - h)) / (2.0 * h);
            let fd = c1.cross(&c2).dot(&c3).abs();
            let jac = zeta_jacobian(&[1.0 / cap.radius; 2], &nu, &k0, t);
            worst_j = worst_j.max((fd - jac).abs() / jac.abs());
        }
    }
    verdict(
        worst_h < 1e-6 && worst_k < 1e-6 && worst_j < 1e-6,
        format!("max rel err H(t) {worst_h:.1e}, kappa(t) {worst_k:.1e}, Jacobian {worst_j:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for f in all_families() {
        let mesh = f.cap().to_mesh_at(5).unwrap();
        let pert = perturb(&mesh, f.amplitude, f.mode, 7).unwrap();
        for (label, s) in [("exact", &mesh), ("perturbed", &pert)] {
            let r = sweepout_coverage(s, s.k0(), 1000, 7).unwrap();
            let diam = s.diameter();
            let pass = r.coverage == 1.0 && r.max_residual < 1e-6 * diam && r.violations == 0;
            ok &= pass;
            if !pass {
                detail.push(format!("{} {label}: coverage {} residual {:.1e} violations {}", f.name, r.coverage, r.max_residual, r.violations));
            }
        }
    }
    let hemi = halfspace(PI / 2.0, 2, "").cap();
    let bad = CapillaryVector::from_vec3(Vector3::new(0.0, 0.0, -1.5));
    let neg = sweepout_coverage(&hemi, &bad, 1000, 7).unwrap();
    let control = neg.no_touch > 0 || neg.coverage < 1.0;
    ok &= control;
    detail.push(format!("10 surfaces x 1000 seeds; negative control |k0|=1.5: coverage {}, no-touch {}", neg.coverage, neg.no_touch));
    verdict(ok, detail.join("; "))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let angle = |rng: &mut ChaCha8Rng| loop {
        let a = PI * rng.random::<f64>();
        if a.sin() >= 1e-3 {
            break a;
        }
    };
    let mut disagree = 0;
    for _ in 0..100_000 {
        let (t1, t2, e1, e2, a) = (angle(&mut rng), angle(&mut rng), angle(&mut rng), angle(&mut rng), angle(&mut rng));
        let p = edge_predicates(t1, t2, e1, e2, a).unwrap();
        let d1 = p.t_ball1 - p.t_surface1;
        let d2 = p.t_ball2 - p.t_surface2;
        if d1.signum() != p.first_polynomial.signum() || d2.signum() != p.second_polynomial.signum() {
            disagree += 1;
        }
    }
    let (mut tested, mut fired) = (0, 0);
    while tested < 10_000 {
        let (t1, t2, a) = (angle(&mut rng), angle(&mut rng), angle(&mut rng));
        if (t2 - t1).cos() + a.cos() <= 0.0 {
            continue;
        }
        let e1 = t1 + (PI - t1) * rng.random::<f64>();
        let e2 = t2 + (PI - t2) * rng.random::<f64>();
        if !(e1 > t1 && e2 > t2 && e1.sin() >= 1e-3 && e2.sin() >= 1e-3) {
            continue;
        }
        let p = edge_predicates(t1, t2, e1, e2, a).unwrap();
        tested += 1;
        if p.contradiction == Some(true) {
            fired += 1;
        }
    }
    verdict(
        disagree == 0 && fired == tested,
        format!("sign disagreements {disagree}/100000; contradiction fired {fired}/{tested}"),
    )
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for f in all_families() {
        let cap = f.cap();
        let mut surfaces = vec![cap.clone()];
        for &l in &DEPTHS {
            let m = cap.to_mesh_at(l).unwrap();
            surfaces.push(perturb(&m, f.amplitude, f.mode, 7).unwrap());
            surfaces.push(m);
        }
        for s in &surfaces {
            let e = elliptic_point(s, s.k0()).unwrap();
            let min_k = e.kappas.iter().copied().fold(f64::INFINITY, f64::min);
            let pass = min_k >= 1.0 / e.event.r0 - 10.0 * e.h - 1e-6 / e.event.r0 && e.passes;
            ok &= pass;
            worst = worst.min(min_k - (1.0 / e.event.r0 - 10.0 * e.h));
            count += 1;
        }
    }
    verdict(ok, format!("{count} surfaces; min over surfaces of min kappa - (1/r0 - 10h) = {worst:.3e}"))
}

fn criterion_10() -> Outcome {
    let sphere = hk_refined_closed(&icosphere(6, Vector3::zeros(), 1.0).unwrap()).unwrap().report;
    let ell = hk_refined_closed(&ellipsoid(6, [2.0, 1.0, 1.0]).unwrap()).unwrap().report;
    verdict(
        sphere.relative_deficit.abs() < 1e-2 && ell.relative_deficit > 3.0 * 1e-2,
        format!("sphere rel deficit {:.2e}; (2,1,1) ellipsoid rel deficit {:.3e}", sphere.relative_deficit, ell.relative_deficit),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("equality case, half-space", criterion_1),
        ("equality case, wedge", criterion_2),
        ("rigidity under perturbation", criterion_3),
        ("admissibility equivalence", criterion_4),
        ("Minkowski identities", criterion_5),
        ("parallel-map algebra", criterion_6),
        ("sweepout surjectivity", criterion_7),
        ("edge analysis", criterion_8),
        ("elliptic point", criterion_9),
        ("closed refinement", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let (ok, detail) = match out {
            Ok(d) if elapsed <= TIME_LIMIT => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {}s", TIME_LIMIT.as_secs())),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {:<30} {} ({:.1}s): {detail}", i + 1, name, if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
