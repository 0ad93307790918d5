//! Surface quadrature, enclosed volume, Heintze-Karcher deficits and
//! Minkowski-type residuals.
//!
//! Mesh integrands are evaluated at vertices (normals and curvatures from the
//! quadric fit) and averaged over each triangle. Analytic caps use closed
//! forms. All reductions go through pairwise summation, so results do not
//! depend on thread scheduling.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curvature::{curvature_field, CurvatureData, CurvatureError};
use crate::quad::{gauss_legendre, pairwise_sum, pairwise_sum_vec};
use crate::surface::frames::{boundary_frames, BoundaryFrame};
use crate::surface::mesh::{MeshStats, TriMesh};
use crate::surface::{CapillarySurface, SurfaceError, SurfaceKind, VertexTag};
use crate::wedge::CapillaryVector;

/// Mean curvature floor, relative to the inverse diameter.
pub const MEAN_CONVEX_FLOOR: f64 = 1e-8;
/// Planar closing contributions larger than this fraction of `|Ω|` mean the
/// boundary does not sit on the wedge planes.
pub const PLANAR_CLOSURE_TOL: f64 = 1e-10;
/// Gauss-Legendre nodes per analytic boundary arc.
const ARC_NODES: usize = 48;

#[derive(Debug, Error)]
pub enum IntegralError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("surface is not strictly mean convex: H = {mean:e} at vertex {vertex}")]
    NotMeanConvex { vertex: usize, mean: f64 },
    #[error("mesh is not closed")]
    NotClosed,
    #[error("boundary does not close against the wedge planes: {0}")]
    OpenBoundary(String),
    #[error("Minkowski order r = {r} outside 1..={n}")]
    InvalidOrder { r: usize, n: usize },
    #[error("this operation needs a half-space (one plane), got {0} planes")]
    NotHalfSpace(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum QuadratureScheme {
    /// One node at the centroid of each triangle.
    #[default]
    Centroid,
    /// Three nodes at the edge midpoints of each triangle, exact for
    /// quadratics.
    ThreePoint,
}

/// Nodes and positive weights; the weights of each triangle sum to its area.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub scheme: QuadratureScheme,
    pub points: Vec<Point3<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(mesh: &TriMesh, scheme: QuadratureScheme) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (f, t) in mesh.faces().iter().enumerate() {
            let a = mesh.face_area(f);
            match scheme {
                QuadratureScheme::Centroid => {
                    points.push(mesh.face_centroid(f));
                    weights.push(a);
                }
                QuadratureScheme::ThreePoint => {
                    for k in 0..3 {
                        let p = mesh.vertex(t[k]).coords + mesh.vertex(t[(k + 1) % 3]).coords;
                        points.push(Point3::from(p * 0.5));
                        weights.push(a / 3.0);
                    }
                }
            }
        }
        QuadratureRule { scheme, points, weights }
    }

    pub fn integrate(&self, f: impl Fn(&Point3<f64>) -> f64 + Sync) -> f64 {
        let terms: Vec<f64> = self.points.par_iter().zip(&self.weights).map(|(p, w)| w * f(p)).collect();
        pairwise_sum(&terms)
    }
}

/// `∫ f dA` for a field given at vertices, averaged over each triangle.
pub fn integrate_vertex_field(mesh: &TriMesh, values: &[f64]) -> f64 {
    let terms: Vec<f64> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let t = mesh.faces()[f];
            mesh.face_area(f) * (values[t[0]] + values[t[1]] + values[t[2]]) / 3.0
        })
        .collect();
    pairwise_sum(&terms)
}

/// Vector-valued version of [`integrate_vertex_field`].
pub fn integrate_vertex_vectors(mesh: &TriMesh, values: &[Vector3<f64>]) -> Vector3<f64> {
    let terms: Vec<Vector3<f64>> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let t = mesh.faces()[f];
            (values[t[0]] + values[t[1]] + values[t[2]]) * (mesh.face_area(f) / 3.0)
        })
        .collect();
    pairwise_sum_vec(&terms)
}

/// Left side, volume term and their difference for one HK functional.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DeficitReport {
    pub hk_integral: f64,
    /// `(n+1)/n |Ω|`.
    pub volume_term: f64,
    pub deficit: f64,
    pub relative_deficit: f64,
    pub volume: f64,
    #[serde(rename = "min_H")]
    pub min_h: f64,
    pub mesh_stats: Option<MeshStats>,
    /// Set when the inequality is not expected to hold (e.g. `|k0| > 1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl DeficitReport {
    fn new(hk_integral: f64, volume: f64, min_h: f64, mesh_stats: Option<MeshStats>) -> Self {
        let volume_term = 1.5 * volume;
        let deficit = hk_integral - volume_term;
        DeficitReport {
            hk_integral,
            volume_term,
            deficit,
            relative_deficit: deficit / volume,
            volume,
            min_h,
            mesh_stats,
            warning: None,
        }
    }
}

pub fn area(surface: &CapillarySurface) -> f64 {
    match surface.kind() {
        SurfaceKind::Analytic(cap) => cap.area(),
        SurfaceKind::Mesh(ms) => mesh_area(ms.mesh()),
    }
}

pub fn mesh_area(mesh: &TriMesh) -> f64 {
    let a: Vec<f64> = (0..mesh.face_count()).map(|f| mesh.face_area(f)).collect();
    pairwise_sum(&a)
}

/// `(1/3) ∫ <x, ν> dA`, exact for a polyhedral surface.
pub fn mesh_position_flux(mesh: &TriMesh) -> f64 {
    let terms: Vec<f64> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| mesh.face_cross(f).dot(&mesh.face_centroid(f).coords) / 2.0)
        .collect();
    pairwise_sum(&terms)
}

/// Enclosed volume of a closed mesh.
pub fn closed_volume(mesh: &TriMesh) -> Result<f64, IntegralError> {
    if !mesh.is_closed() {
        return Err(IntegralError::NotClosed);
    }
    Ok(mesh_position_flux(mesh) / 3.0)
}

/// Volume of the region bounded by a surface and the wedge planes.
pub fn enclosed_volume(surface: &CapillarySurface) -> Result<f64, IntegralError> {
    match surface.kind() {
        SurfaceKind::Analytic(cap) => Ok(cap.volume()),
        SurfaceKind::Mesh(ms) => {
            let mesh = ms.mesh();
            let volume = mesh_position_flux(mesh) / 3.0;
            if mesh.is_closed() {
                return Ok(volume);
            }
            let planar = planar_closure(surface)?;
            let worst = planar.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if !(worst <= PLANAR_CLOSURE_TOL * volume.abs()) {
                return Err(IntegralError::OpenBoundary(format!(
                    "closing faces contribute {worst:e} to the volume ({volume:e})"
                )));
            }
            Ok(volume)
        }
    }
}

/// Contribution of each closing wetted face to `(1/3)∫<x, ν>`, computed by
/// fanning that plane's boundary edges to their own centroid. Zero for
/// boundaries lying on planes through the origin.
pub fn planar_closure(surface: &CapillarySurface) -> Result<Vec<f64>, IntegralError> {
    let ms = surface.as_mesh().ok_or_else(|| IntegralError::OpenBoundary("not a mesh".into()))?;
    let mesh = ms.mesh();
    let planes = surface.wedge().plane_count();
    let tags = ms.tags();
    let on = |v: usize, i: usize| match tags[v] {
        VertexTag::Plane(j) => j == i,
        VertexTag::Edge => true,
        VertexTag::Interior => false,
    };
    let mut out = Vec::with_capacity(planes);
    for i in 0..planes {
        let mut pts = Vec::new();
        let mut cross = Vector3::zeros();
        for lp in mesh.boundary_loops() {
            for k in 0..lp.len() {
                let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
                if on(a, i) && on(b, i) {
                    let (pa, pb) = (mesh.vertex(a).coords, mesh.vertex(b).coords);
                    cross += pa.cross(&pb);
                    pts.push(pa);
                }
            }
        }
        if pts.is_empty() {
            out.push(0.0);
            continue;
        }
        let o = pts.iter().fold(Vector3::zeros(), |a, p| a + p) / pts.len() as f64;
        out.push(o.dot(&cross) / 6.0);
    }
    Ok(out)
}

fn fitted_curvature(surface: &CapillarySurface) -> Result<&[CurvatureData], IntegralError> {
    let ms = surface.as_mesh().expect("mesh surface");
    Ok(ms.curvature()?)
}

fn check_mean_convex(curv: &[CurvatureData], diameter: f64) -> Result<f64, IntegralError> {
    let floor = MEAN_CONVEX_FLOOR / diameter;
    let mut min = f64::INFINITY;
    for (v, c) in curv.iter().enumerate() {
        if !(c.mean > floor) {
            return Err(IntegralError::NotMeanConvex { vertex: v, mean: c.mean });
        }
        min = min.min(c.mean);
    }
    Ok(min)
}

/// `∫_Σ (1 + <ν, k0>) / H dA` against `(3/2)|Ω|`.
pub fn hk_deficit_wedge(surface: &CapillarySurface, k0: &CapillaryVector) -> Result<DeficitReport, IntegralError> {
    let k = k0.vec3();
    let mut report = match surface.kind() {
        SurfaceKind::Analytic(cap) => DeficitReport::new(cap.hk_integral(&k), cap.volume(), 2.0 / cap.radius, None),
        SurfaceKind::Mesh(ms) => {
            let mesh = ms.mesh();
            let curv = fitted_curvature(surface)?;
            let min_h = check_mean_convex(curv, mesh.diameter())?;
            let f: Vec<f64> = curv.iter().map(|c| (1.0 + c.normal.dot(&k)) / c.mean).collect();
            let volume = enclosed_volume(surface)?;
            DeficitReport::new(integrate_vertex_field(mesh, &f), volume, min_h, Some(mesh.stats()))
        }
    };
    let norm = k0.norm();
    if norm > 1.0 + crate::wedge::ADMISSIBLE_TOL {
        report.warning = Some(format!("|k0| = {norm:.6} > 1: the inequality is not expected to hold"));
    }
    Ok(report)
}

/// Half-space form with `k0 = cos(theta0) N`.
pub fn hk_deficit_halfspace(surface: &CapillarySurface, theta0: f64) -> Result<DeficitReport, IntegralError> {
    let normals = surface.wedge().normals3().map_err(SurfaceError::from)?;
    if normals.len() != 1 {
        return Err(IntegralError::NotHalfSpace(normals.len()));
    }
    hk_deficit_wedge(surface, &CapillaryVector::from_vec3(normals[0] * theta0.cos()))
}

/// Refined closed-surface functional `∫ 1/H − |∫ ν/H| − (3/2)|Ω|`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClosedReport {
    #[serde(flatten)]
    pub report: DeficitReport,
    pub inverse_mean_integral: f64,
    /// `∫ ν/H dA`; its direction maximizes the subtracted term.
    pub weighted_flux: Vector3<f64>,
}

pub fn hk_refined_closed(mesh: &TriMesh) -> Result<ClosedReport, IntegralError> {
    if !mesh.is_closed() {
        return Err(IntegralError::NotClosed);
    }
    let curv = curvature_field(mesh)?;
    let min_h = check_mean_convex(&curv, mesh.diameter())?;
    let inv: Vec<f64> = curv.iter().map(|c| 1.0 / c.mean).collect();
    let nu_h: Vec<Vector3<f64>> = curv.iter().map(|c| c.normal / c.mean).collect();
    let i = integrate_vertex_field(mesh, &inv);
    let v = integrate_vertex_vectors(mesh, &nu_h);
    let volume = closed_volume(mesh)?;
    Ok(ClosedReport {
        report: DeficitReport::new(i - v.norm(), volume, min_h, Some(mesh.stats())),
        inverse_mean_integral: i,
        weighted_flux: v,
    })
}

/// `∫_Σ H_{r-1}(1 + <ν, k0>) − H_r <x, ν> dA` with normalized `H_r`.
pub fn minkowski_residual(surface: &CapillarySurface, k0: &CapillaryVector, r: usize) -> Result<f64, IntegralError> {
    let n = 2;
    if r == 0 || r > n {
        return Err(IntegralError::InvalidOrder { r, n });
    }
    let k = k0.vec3();
    match surface.kind() {
        SurfaceKind::Analytic(cap) => Ok(cap.minkowski_residual(&k, r)),
        SurfaceKind::Mesh(ms) => {
            let mesh = ms.mesh();
            let curv = fitted_curvature(surface)?;
            let f: Vec<f64> = curv
                .iter()
                .enumerate()
                .map(|(v, c)| c.higher[r - 1] * (1.0 + c.normal.dot(&k)) - c.higher[r] * mesh.vertex(v).coords.dot(&c.normal))
                .collect();
            Ok(integrate_vertex_field(mesh, &f))
        }
    }
}

fn structural_integrand(x: &Vector3<f64>, nu: &Vector3<f64>, mu: &Vector3<f64>) -> Vector3<f64> {
    nu * x.dot(mu) - mu * x.dot(nu)
}

/// `n ∫_Σ ν dA − ∮ (<x, μ> ν − <x, ν> μ) ds` for a capillary surface:
/// Gauss-Legendre on the exact arcs of an analytic cap, the trapezoid rule
/// with the boundary frames on a mesh.
pub fn structural_residual(surface: &CapillarySurface) -> Result<Vector3<f64>, IntegralError> {
    match surface.kind() {
        SurfaceKind::Analytic(cap) => {
            let (xs, ws) = gauss_legendre(ARC_NODES);
            let mut line = Vector3::zeros();
            for arc in cap.arcs() {
                let half = 0.5 * (arc.s1 - arc.s0);
                let mid = 0.5 * (arc.s1 + arc.s0);
                let terms: Vec<Vector3<f64>> = xs
                    .iter()
                    .zip(&ws)
                    .map(|(t, w)| {
                        let s = mid + half * t;
                        let x = arc.point(s);
                        let f = BoundaryFrame::build(None, x, arc.plane, false, cap.normal_at(&x), cap.normals[arc.plane], arc.tangent(s));
                        structural_integrand(&x, &f.nu, &f.mu) * (w * half * arc.radius)
                    })
                    .collect();
                line += pairwise_sum_vec(&terms);
            }
            Ok(cap.flux() * 2.0 - line)
        }
        SurfaceKind::Mesh(ms) => {
            let mesh = ms.mesh();
            let frames = boundary_frames(surface)?;
            let by_key: HashMap<(usize, usize), &BoundaryFrame> =
                frames.iter().filter_map(|f| f.vertex.map(|v| ((v, f.plane), f))).collect();
            let mut terms = Vec::new();
            for lp in mesh.boundary_loops() {
                for k in 0..lp.len() {
                    let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
                    let plane = (0..surface.wedge().plane_count()).find(|i| by_key.contains_key(&(a, *i)) && by_key.contains_key(&(b, *i)));
                    let Some(i) = plane else {
                        return Err(IntegralError::OpenBoundary(format!("boundary edge ({a}, {b}) spans two planes")));
                    };
                    let (fa, fb) = (by_key[&(a, i)], by_key[&(b, i)]);
                    let len = (fb.point - fa.point).norm();
                    terms.push(
                        (structural_integrand(&fa.point, &fa.nu, &fa.mu) + structural_integrand(&fb.point, &fb.nu, &fb.mu)) * (0.5 * len),
                    );
                }
            }
            let flux: Vec<Vector3<f64>> = (0..mesh.face_count()).map(|f| mesh.face_cross(f) / 2.0).collect();
            Ok(pairwise_sum_vec(&flux) * 2.0 - pairwise_sum_vec(&terms))
        }
    }
}

/// Same identity for an arbitrary open mesh, by the midpoint rule on each
/// boundary edge with the averaged endpoint normal and the edge conormal
/// `e x ν` (the mesh lies to the left of each loop). Exact for flat meshes.
pub fn structural_residual_open(mesh: &TriMesh) -> Result<Vector3<f64>, IntegralError> {
    if mesh.is_closed() {
        return Err(IntegralError::Surface(SurfaceError::NoBoundary));
    }
    let mut terms = Vec::new();
    for lp in mesh.boundary_loops() {
        for k in 0..lp.len() {
            let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
            let (pa, pb) = (mesh.vertex(a).coords, mesh.vertex(b).coords);
            let e = pb - pa;
            let nu = (mesh.vertex_normal(a) + mesh.vertex_normal(b)).normalize();
            let mu = e.cross(&nu).normalize();
            terms.push(structural_integrand(&((pa + pb) * 0.5), &nu, &mu) * e.norm());
        }
    }
    let flux: Vec<Vector3<f64>> = (0..mesh.face_count()).map(|f| mesh.face_cross(f) / 2.0).collect();
    Ok(pairwise_sum_vec(&flux) * 2.0 - pairwise_sum_vec(&terms))
}
