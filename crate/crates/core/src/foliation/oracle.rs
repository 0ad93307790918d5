//! Nearest-point, farthest-point and inside queries against a surface.
//!
//! Analytic caps are answered in closed form. Meshes that sample a smooth
//! cap use the mesh only to pick a starting direction and then project onto
//! the smooth surface. Plain meshes are treated as the polyhedral surface.

use nalgebra::Vector3;
use rstar::primitives::GeomWithData;
use rstar::RTree;

use super::FoliationError;
use crate::curvature::CurvatureData;
use crate::surface::mesh::TriMesh;
use crate::surface::smooth::SmoothCap;
use crate::surface::{CapillarySurface, SurfaceKind};

/// Vertices whose incident faces are scanned in a polyhedral query.
const CANDIDATE_VERTICES: usize = 16;

type Indexed = GeomWithData<[f64; 3], usize>;

/// Nearest point of the surface with the data needed at a touch.
#[derive(Debug, Clone, PartialEq)]
pub struct Foot {
    pub point: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub distance: f64,
    /// Nearest mesh vertex, for mesh surfaces.
    pub vertex: Option<usize>,
}

pub(crate) enum Shape<'a> {
    Analytic(SmoothCap),
    Smooth { smooth: SmoothCap, mesh: &'a TriMesh, dirs: &'a [Vector3<f64>] },
    Mesh { mesh: &'a TriMesh, curvature: &'a [CurvatureData] },
}

pub(crate) struct Oracle<'a> {
    pub shape: Shape<'a>,
    tree: Option<RTree<Indexed>>,
    pub diameter: f64,
}

impl<'a> Oracle<'a> {
    pub fn new(surface: &'a CapillarySurface) -> Result<Self, FoliationError> {
        let diameter = surface.diameter();
        match surface.kind() {
            SurfaceKind::Analytic(cap) => Ok(Oracle { shape: Shape::Analytic(SmoothCap::exact(cap.clone())), tree: None, diameter }),
            SurfaceKind::Mesh(ms) => {
                let mesh = ms.mesh();
                let tree = RTree::bulk_load(
                    mesh.vertices().iter().enumerate().map(|(i, p)| GeomWithData::new([p.x, p.y, p.z], i)).collect(),
                );
                let shape = match ms.backing() {
                    Some(b) => Shape::Smooth { smooth: b.smooth.clone(), mesh, dirs: &b.dirs },
                    None => Shape::Mesh { mesh, curvature: ms.curvature()? },
                };
                Ok(Oracle { shape, tree: Some(tree), diameter })
            }
        }
    }

    fn nearest_vertex(&self, p: &Vector3<f64>) -> usize {
        self.tree.as_ref().and_then(|t| t.nearest_neighbor([p.x, p.y, p.z])).map(|g| g.data).unwrap_or(0)
    }

    /// Nearest point of the surface to `p`.
    pub fn closest(&self, p: &Vector3<f64>) -> Foot {
        match &self.shape {
            Shape::Analytic(s) => {
                let x = s.cap().closest_point(p);
                Foot { point: x, normal: s.cap().normal_at(&x), distance: (x - p).norm(), vertex: None }
            }
            Shape::Smooth { smooth, mesh, dirs } => {
                let v = self.nearest_vertex(p);
                match smooth.closest_point(p, &dirs[v]) {
                    Some((x, u)) if (x - p).norm() <= (mesh.vertex(v).coords - p).norm() + 1e-12 * self.diameter => {
                        Foot { point: x, normal: smooth.normal(&u), distance: (x - p).norm(), vertex: Some(v) }
                    }
                    _ => {
                        // minimum on the boundary or a poor start: polyhedral answer,
                        // then the smooth normal at its direction
                        let (x, _) = self.polyhedral_closest(mesh, p);
                        let u = smooth.direction_of(&x);
                        Foot { point: x, normal: smooth.normal(&u), distance: (x - p).norm(), vertex: Some(v) }
                    }
                }
            }
            Shape::Mesh { mesh, curvature } => {
                let (x, (f, bary)) = self.polyhedral_closest(mesh, p);
                let t = mesh.faces()[f];
                let n = (curvature[t[0]].normal * bary[0] + curvature[t[1]].normal * bary[1] + curvature[t[2]].normal * bary[2])
                    .normalize();
                let v = t[(0..3).max_by(|a, b| bary[*a].total_cmp(&bary[*b])).unwrap_or(0)];
                Foot { point: x, normal: n, distance: (x - p).norm(), vertex: Some(v) }
            }
        }
    }

    /// Nearest point on the faces around the vertices nearest to `p`, with
    /// the face and barycentric coordinates.
    fn polyhedral_closest(&self, mesh: &TriMesh, p: &Vector3<f64>) -> (Vector3<f64>, (usize, [f64; 3])) {
        let tree = self.tree.as_ref().expect("mesh oracle has a tree");
        let mut best = (f64::INFINITY, Vector3::zeros(), (0, [1.0, 0.0, 0.0]));
        for g in tree.nearest_neighbor_iter([p.x, p.y, p.z]).take(CANDIDATE_VERTICES) {
            for &f in mesh.vertex_faces(g.data) {
                let t = mesh.faces()[f];
                let (x, bary) = closest_on_triangle(p, &t.map(|v| mesh.vertex(v).coords));
                let d = (x - p).norm();
                if d < best.0 {
                    best = (d, x, (f, bary));
                }
            }
        }
        (best.1, best.2)
    }

    /// Surface points used for farthest-point queries: every vertex of a
    /// mesh. Analytic caps are handled in closed form by the caller.
    pub fn vertices(&self) -> Option<&TriMesh> {
        match &self.shape {
            Shape::Analytic(_) => None,
            Shape::Smooth { mesh, .. } | Shape::Mesh { mesh, .. } => Some(mesh),
        }
    }

    /// Outward normal at vertex `v` (smooth normal when known).
    pub fn vertex_normal(&self, v: usize) -> Vector3<f64> {
        match &self.shape {
            Shape::Analytic(_) => unreachable!("analytic surfaces have no vertices"),
            Shape::Smooth { smooth, dirs, .. } => smooth.normal(&dirs[v]),
            Shape::Mesh { curvature, .. } => curvature[v].normal,
        }
    }

    /// Largest principal curvature at a surface point, for the time bound
    /// of the parallel map.
    pub fn kappa_max(&self, foot: &Foot) -> f64 {
        match &self.shape {
            Shape::Analytic(s) => 1.0 / s.cap().radius,
            Shape::Smooth { smooth, .. } => smooth.curvature(&smooth.direction_of(&foot.point)).kappa_max(),
            Shape::Mesh { curvature, .. } => curvature[foot.vertex.unwrap_or(0)].kappa_max(),
        }
    }

    /// Strictly inside the enclosed region.
    pub fn contains(&self, y: &Vector3<f64>, normals: &[Vector3<f64>]) -> bool {
        match &self.shape {
            Shape::Analytic(s) => s.cap().contains(y),
            Shape::Smooth { smooth, .. } => smooth.contains(y),
            Shape::Mesh { mesh, .. } => normals.iter().all(|n| n.dot(y) < 0.0) && winding_number(mesh, y) > 0.5,
        }
    }
}

/// Closest point of a triangle to `p` with its barycentric coordinates.
pub fn closest_on_triangle(p: &Vector3<f64>, t: &[Vector3<f64>; 3]) -> (Vector3<f64>, [f64; 3]) {
    let (a, b, c) = (t[0], t[1], t[2]);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (a, [1.0, 0.0, 0.0]);
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (b, [0.0, 1.0, 0.0]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, [1.0 - v, v, 0.0]);
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (c, [0.0, 0.0, 1.0]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, [1.0 - w, 0.0, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, [0.0, 1.0 - w, w]);
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, [1.0 - v - w, v, w])
}

/// Generalized winding number of `∂Ω` around `y`, where `∂Ω` is the mesh
/// closed by fanning each boundary loop to the origin (the wetted faces lie
/// in planes through the origin).
pub fn winding_number(mesh: &TriMesh, y: &Vector3<f64>) -> f64 {
    let solid = |a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>| {
        let (a, b, c) = (a - y, b - y, c - y);
        let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
        let num = a.dot(&b.cross(&c));
        let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
        2.0 * num.atan2(den)
    };
    let mut total = 0.0;
    for t in mesh.faces() {
        total += solid(mesh.vertex(t[0]).coords, mesh.vertex(t[1]).coords, mesh.vertex(t[2]).coords);
    }
    // boundary loops run with the surface on the left; the closing fan is
    // traversed the other way
    for lp in mesh.boundary_loops() {
        for k in 0..lp.len() {
            let (a, b) = (mesh.vertex(lp[k]).coords, mesh.vertex(lp[(k + 1) % lp.len()]).coords);
            total += solid(b, a, Vector3::zeros());
        }
    }
    total / (4.0 * std::f64::consts::PI)
}
