//! First-touch searches along `S_r(y + r k0)`, touch classification and the
//! elliptic-point finder.

use nalgebra::Vector3;
use serde::Serialize;

use super::oracle::{Foot, Oracle};
use super::parallel::{time_bound, zeta_at};
use super::{radius_grid, FoliationError, ANGLE_TOL, BRACKET_TOL, GRID_MAX, INCIDENCE_TOL};
use crate::surface::{CapillarySurface, SurfaceKind, VertexTag};
use crate::wedge::CapillaryVector;

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub enum TouchClass {
    Interior,
    Face(usize),
    Edge,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TouchEvent {
    pub r0: f64,
    pub y: Vector3<f64>,
    /// `y + r0 k0`.
    pub center: Vector3<f64>,
    pub x: Vector3<f64>,
    pub class: TouchClass,
    /// Planes through `x`, with the ball's angle `η^i` and the surface's
    /// contact angle `θ^i(x)` on each.
    pub planes: Vec<usize>,
    pub etas: Vec<f64>,
    pub thetas: Vec<f64>,
    /// A touch from inside at a plane with `η^i < θ^i(x)`.
    pub violation: bool,
    /// Final bracket width of `r0`.
    pub gap: f64,
    pub vertex: Option<usize>,
    /// Surface points tied for the touch (meshes); `0` means every point of
    /// an analytic surface ties.
    pub multiplicity: usize,
    pub surface_normal: Vector3<f64>,
    /// Outward normal of the ball at `x`.
    pub ball_normal: Vector3<f64>,
    /// `1/κ_1(x)`.
    pub t_max: f64,
    /// `|y − ζ(x, r0)|` with the surface normal at `x`.
    pub residual: f64,
    /// The sphere encloses the surface (exterior search).
    pub exterior: bool,
}

fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    // pred(lo) false, pred(hi) true
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn event_from_foot(foot: &Foot, y: Vector3<f64>, center: Vector3<f64>, r0: f64, gap: f64, k: &Vector3<f64>, exterior: bool) -> TouchEvent {
    let ball_normal = if r0 > 0.0 { (foot.point - center) / r0 } else { foot.normal };
    TouchEvent {
        r0,
        y,
        center,
        x: foot.point,
        class: TouchClass::Interior,
        planes: Vec::new(),
        etas: Vec::new(),
        thetas: Vec::new(),
        violation: false,
        gap,
        vertex: foot.vertex,
        multiplicity: 1,
        surface_normal: foot.normal,
        ball_normal,
        t_max: f64::INFINITY,
        residual: (y - zeta_at(&foot.point, &foot.normal, r0, k)).norm(),
        exterior,
    }
}

/// Smallest `r` with `dist(y + r k0, Σ) = r`, for `y` strictly inside `Ω`.
pub fn first_touch_interior(y: &Vector3<f64>, k0: &CapillaryVector, surface: &CapillarySurface) -> Result<TouchEvent, FoliationError> {
    let oracle = Oracle::new(surface)?;
    interior_with(&oracle, surface, y, k0)
}

pub(crate) fn interior_with(
    oracle: &Oracle,
    surface: &CapillarySurface,
    y: &Vector3<f64>,
    k0: &CapillaryVector,
) -> Result<TouchEvent, FoliationError> {
    let normals = surface.wedge().normals3()?;
    if !oracle.contains(y, &normals) {
        return Err(FoliationError::NotInside([y.x, y.y, y.z]));
    }
    let k = k0.vec3();
    let diam = oracle.diameter;
    let g = |r: f64| oracle.closest(&(y + k * r)).distance - r;
    let mut lo = 0.0;
    let mut hi = None;
    for r in radius_grid(diam) {
        if g(r) <= 0.0 {
            hi = Some(r);
            break;
        }
        lo = r;
    }
    let hi = hi.ok_or(FoliationError::NoTouch { r_max: GRID_MAX * diam })?;
    let (lo, hi) = bisect(lo, hi, BRACKET_TOL * diam, |r| g(r) <= 0.0);
    let r0 = hi;
    let center = y + k * r0;
    let foot = oracle.closest(&center);
    let mut ev = event_from_foot(&foot, *y, center, r0, hi - lo, &k, false);
    ev.t_max = time_bound(oracle.kappa_max(&foot));
    classify_touch(&mut ev, surface)?;
    Ok(ev)
}

/// Smallest `r` with `Σ ⊂ B̄_r(y + r k0)`; the last point to leave the
/// shrinking ball is the touch point.
pub fn first_touch_exterior(y: &Vector3<f64>, k0: &CapillaryVector, surface: &CapillarySurface) -> Result<TouchEvent, FoliationError> {
    let oracle = Oracle::new(surface)?;
    let k = k0.vec3();
    let diam = oracle.diameter;
    let far = |c: &Vector3<f64>| -> f64 {
        match (surface.kind(), oracle.vertices()) {
            (SurfaceKind::Analytic(cap), _) => (cap.farthest_point(c) - c).norm(),
            (_, Some(mesh)) => mesh.vertices().iter().map(|p| (p.coords - c).norm()).fold(0.0, f64::max),
            _ => unreachable!("mesh surfaces have vertices"),
        }
    };
    let h = |r: f64| far(&(y + k * r)) - r <= 0.0;
    let mut lo = 0.0;
    let mut hi = None;
    for r in radius_grid(diam) {
        if h(r) {
            hi = Some(r);
            break;
        }
        lo = r;
    }
    let hi = hi.ok_or(FoliationError::NoEnclosure { r_max: GRID_MAX * diam })?;
    let (lo, hi) = bisect(lo, hi, BRACKET_TOL * diam, h);
    let r0 = hi;
    let center = y + k * r0;
    let tie = INCIDENCE_TOL * diam;
    let (foot, multiplicity) = match (surface.kind(), oracle.vertices()) {
        (SurfaceKind::Analytic(cap), _) => {
            let x = cap.farthest_point(&center);
            let whole = (center - cap.center).norm() <= tie;
            (Foot { point: x, normal: cap.normal_at(&x), distance: (x - center).norm(), vertex: None }, if whole { 0 } else { 1 })
        }
        (_, Some(mesh)) => {
            let d: Vec<f64> = mesh.vertices().iter().map(|p| (p.coords - center).norm()).collect();
            let max = d.iter().copied().fold(0.0, f64::max);
            let ties: Vec<usize> = (0..d.len()).filter(|&v| d[v] >= max - tie).collect();
            let v = ties[0];
            let x = mesh.vertex(v).coords;
            (Foot { point: x, normal: oracle.vertex_normal(v), distance: d[v], vertex: Some(v) }, ties.len())
        }
        _ => unreachable!("mesh surfaces have vertices"),
    };
    let mut ev = event_from_foot(&foot, *y, center, r0, hi - lo, &k, true);
    ev.multiplicity = multiplicity;
    ev.t_max = time_bound(oracle.kappa_max(&foot));
    classify_touch(&mut ev, surface)?;
    Ok(ev)
}

/// Fills class, incident planes, `η^i`, `θ^i(x)` and the violation flag.
/// A point within `1e-9 diam` of both planes is an edge touch.
pub fn classify_touch(event: &mut TouchEvent, surface: &CapillarySurface) -> Result<(), FoliationError> {
    let normals = surface.wedge().normals3()?;
    let tol = INCIDENCE_TOL * surface.diameter();
    let mut planes: Vec<usize> = (0..normals.len()).filter(|&i| normals[i].dot(&event.x).abs() <= tol).collect();
    // a mesh vertex tagged on the edge counts on both planes
    if let (Some(v), SurfaceKind::Mesh(ms)) = (event.vertex, surface.kind()) {
        if ms.tags()[v] == VertexTag::Edge && (ms.mesh().vertex(v).coords - event.x).norm() <= tol {
            planes = (0..normals.len()).collect();
        }
    }
    event.class = match planes.len() {
        0 => TouchClass::Interior,
        1 => TouchClass::Face(planes[0]),
        _ => TouchClass::Edge,
    };
    event.etas = planes.iter().map(|&i| (-event.ball_normal.dot(&normals[i])).clamp(-1.0, 1.0).acos()).collect();
    event.thetas = planes.iter().map(|&i| (-event.surface_normal.dot(&normals[i])).clamp(-1.0, 1.0).acos()).collect();
    event.violation = !event.exterior && event.etas.iter().zip(&event.thetas).any(|(e, t)| *e < t - ANGLE_TOL);
    event.planes = planes;
    Ok(())
}

/// Seed for the exterior search: the center of the wetted disk in a
/// half-space; on the edge for a two-plane wedge, between the points where
/// the surface meets it, or any edge point when `|k0| < 1`.
pub fn elliptic_seed(surface: &CapillarySurface) -> Result<Vector3<f64>, FoliationError> {
    let normals = surface.wedge().normals3()?;
    let project = |x: Vector3<f64>| normals.iter().fold(x, |p, n| p - n * n.dot(&p));
    match normals.len() {
        1 => Ok(match surface.kind() {
            SurfaceKind::Analytic(cap) => cap.plane_circle(0).0,
            SurfaceKind::Mesh(ms) => {
                let mesh = ms.mesh();
                let pts: Vec<Vector3<f64>> =
                    mesh.boundary_loops().iter().flatten().map(|&v| mesh.vertex(v).coords).collect();
                if pts.is_empty() {
                    return Err(FoliationError::NoSeed("surface has no boundary".into()));
                }
                project(pts.iter().fold(Vector3::zeros(), |a, p| a + p) / pts.len() as f64)
            }
        }),
        2 => {
            let l = surface.wedge().edge_direction()?;
            let on_edge: Vec<Vector3<f64>> = match surface.kind() {
                SurfaceKind::Analytic(cap) => cap.edge_points(),
                SurfaceKind::Mesh(ms) => (0..ms.mesh().vertex_count())
                    .filter(|&v| ms.tags()[v] == VertexTag::Edge)
                    .map(|v| ms.mesh().vertex(v).coords)
                    .collect(),
            };
            if on_edge.len() >= 2 {
                let s: Vec<f64> = on_edge.iter().map(|p| p.dot(&l)).collect();
                let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi - lo > INCIDENCE_TOL * surface.diameter() {
                    return Ok(l * (0.5 * (lo + hi)));
                }
            }
            if surface.k0().norm() < 1.0 - crate::wedge::ADMISSIBLE_TOL {
                let c = match surface.kind() {
                    SurfaceKind::Analytic(cap) => cap.center,
                    SurfaceKind::Mesh(ms) => {
                        let m = ms.mesh();
                        m.vertices().iter().fold(Vector3::zeros(), |a, p| a + p.coords) / m.vertex_count() as f64
                    }
                };
                return Ok(l * c.dot(&l));
            }
            Err(FoliationError::NoSeed("the surface does not meet the edge and |k0| = 1".into()))
        }
        n => Err(FoliationError::NoSeed(format!("{n} planes"))),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EllipticPoint {
    pub seed: Vector3<f64>,
    pub event: TouchEvent,
    pub kappas: Vec<f64>,
    /// `min κ_i · r0`.
    pub min_kappa_r0: f64,
    /// Mean edge length (zero for analytic caps).
    pub h: f64,
    /// `min κ_i >= 1/r0 − tol` with `tol = 10 h` on meshes, `1e-6/r0` on
    /// analytic caps.
    pub passes: bool,
    /// Angle between the surface and ball normals at the touch.
    pub normal_gap: f64,
}

pub fn elliptic_point(surface: &CapillarySurface, k0: &CapillaryVector) -> Result<EllipticPoint, FoliationError> {
    let seed = elliptic_seed(surface)?;
    let event = first_touch_exterior(&seed, k0, surface)?;
    let (kappas, h) = match surface.kind() {
        SurfaceKind::Analytic(cap) => (vec![1.0 / cap.radius; 2], 0.0),
        SurfaceKind::Mesh(ms) => {
            let v = event.vertex.expect("mesh touch has a vertex");
            (ms.curvature()?[v].kappas.clone(), ms.mesh().stats().mean_edge)
        }
    };
    let kmin = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = if h > 0.0 { 10.0 * h } else { 1e-6 / event.r0 };
    let normal_gap = event.surface_normal.dot(&event.ball_normal).clamp(-1.0, 1.0).acos();
    Ok(EllipticPoint {
        seed,
        min_kappa_r0: kmin * event.r0,
        passes: kmin >= 1.0 / event.r0 - tol,
        event,
        kappas,
        h,
        normal_gap,
    })
}
