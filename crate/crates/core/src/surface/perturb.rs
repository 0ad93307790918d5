//! Boundary-flat perturbations of generated cap meshes.

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::mesh::TriMesh;
use super::smooth::{Perturbation, SmoothCap};
use super::{CapillarySurface, SmoothBacking, SurfaceError, SurfaceKind};

/// Relative mean-curvature floor below which a surface counts as not
/// strictly mean convex (scaled by the inverse diameter).
pub const MEAN_CONVEX_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub amplitude: f64,
    pub mode: u32,
    #[serde(default)]
    pub seed: u64,
}

/// Displaces the vertices of a generated cap along the radial direction by
/// `amplitude * phi`, where `phi` vanishes with its first derivatives on
/// the boundary and has maximum modulus 1.
pub fn perturb(surface: &CapillarySurface, amplitude: f64, mode: u32, seed: u64) -> Result<CapillarySurface, SurfaceError> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(SurfaceError::InvalidAmplitude(amplitude));
    }
    let meshed = match surface.kind() {
        SurfaceKind::Analytic(_) => surface.to_mesh()?,
        SurfaceKind::Mesh(_) => surface.clone(),
    };
    let ms = meshed.as_mesh().ok_or_else(|| SurfaceError::NotMeshable("no mesh".into()))?;
    let backing = ms
        .backing()
        .ok_or_else(|| SurfaceError::NotMeshable("perturbation needs a generated cap mesh".into()))?;
    if !backing.smooth.is_exact() {
        return Err(SurfaceError::NotMeshable("surface is already perturbed".into()));
    }
    if amplitude == 0.0 {
        return Ok(meshed);
    }
    let cap = backing.smooth.cap().clone();
    let smooth = SmoothCap::perturbed(cap.clone(), Perturbation::new(&cap, amplitude, mode, seed));
    let dirs = backing.dirs.clone();
    let mesh = ms.mesh().map_vertices(|i, _| Point3::from(smooth.point(&dirs[i])))?;

    let floor = MEAN_CONVEX_FLOOR / mesh.diameter();
    for (v, u) in dirs.iter().enumerate() {
        let rho = cap.radius + smooth.psi(u).0;
        let h = smooth.curvature(u).mean;
        if !(rho > 0.0 && h > floor) {
            return Err(SurfaceError::LostMeanConvexity { vertex: v, mean: h });
        }
    }
    let out = CapillarySurface::new_mesh(
        mesh,
        ms.tags().to_vec(),
        Some(SmoothBacking { smooth, dirs }),
        meshed.wedge().clone(),
        meshed.target_angles().clone(),
        meshed.k0().clone(),
    );
    let pm = out.as_mesh().expect("mesh surface");
    let curv = pm.curvature()?;
    if let Some((v, c)) = curv.iter().enumerate().find(|(_, c)| !(c.mean > floor)) {
        return Err(SurfaceError::LostMeanConvexity { vertex: v, mean: c.mean });
    }
    if let Some((a, b)) = find_self_intersection(pm.mesh()) {
        return Err(SurfaceError::SelfIntersection { a, b });
    }
    Ok(out)
}

/// First pair of vertex-disjoint faces that cross, scanning candidate pairs
/// from a uniform grid of face bounding boxes.
pub fn find_self_intersection(mesh: &TriMesh) -> Option<(usize, usize)> {
    let stats = mesh.stats();
    let cell = 2.0 * stats.max_edge;
    if !(cell > 0.0) {
        return None;
    }
    let (lo, _) = mesh.bounds();
    let key = |p: f64, l: f64| ((p - l) / cell).floor() as i64;
    let mut grid: BTreeMap<(i64, i64, i64), Vec<usize>> = BTreeMap::new();
    for (f, t) in mesh.faces().iter().enumerate() {
        let ps = t.map(|v| mesh.vertex(v));
        let mut bl = [i64::MAX; 3];
        let mut bh = [i64::MIN; 3];
        for p in &ps {
            for k in 0..3 {
                bl[k] = bl[k].min(key(p[k], lo[k]));
                bh[k] = bh[k].max(key(p[k], lo[k]));
            }
        }
        for x in bl[0]..=bh[0] {
            for y in bl[1]..=bh[1] {
                for z in bl[2]..=bh[2] {
                    grid.entry((x, y, z)).or_default().push(f);
                }
            }
        }
    }
    let mut best: Option<(usize, usize)> = None;
    for faces in grid.values() {
        for (i, &a) in faces.iter().enumerate() {
            for &b in &faces[i + 1..] {
                let (fa, fb) = (mesh.faces()[a], mesh.faces()[b]);
                if fa.iter().any(|v| fb.contains(v)) {
                    continue;
                }
                let pair = (a.min(b), a.max(b));
                if best.is_some_and(|p| p <= pair) {
                    continue;
                }
                if triangles_cross(&fa.map(|v| mesh.vertex(v).coords), &fb.map(|v| mesh.vertex(v).coords)) {
                    best = Some(pair);
                }
            }
        }
    }
    best
}

fn triangles_cross(a: &[Vector3<f64>; 3], b: &[Vector3<f64>; 3]) -> bool {
    (0..3).any(|k| segment_hits(&a[k], &a[(k + 1) % 3], b)) || (0..3).any(|k| segment_hits(&b[k], &b[(k + 1) % 3], a))
}

/// Segment `p -> q` crosses the interior of triangle `t`.
fn segment_hits(p: &Vector3<f64>, q: &Vector3<f64>, t: &[Vector3<f64>; 3]) -> bool {
    const EPS: f64 = 1e-12;
    let d = q - p;
    let e1 = t[1] - t[0];
    let e2 = t[2] - t[0];
    let h = d.cross(&e2);
    let det = e1.dot(&h);
    let scale = e1.norm() * e2.norm() * d.norm();
    if det.abs() <= EPS * scale {
        return false;
    }
    let s = p - t[0];
    let u = s.dot(&h) / det;
    if u <= EPS || u >= 1.0 - EPS {
        return false;
    }
    let qv = s.cross(&e1);
    let v = d.dot(&qv) / det;
    if v <= EPS || u + v >= 1.0 - EPS {
        return false;
    }
    let tt = e2.dot(&qv) / det;
    tt > EPS && tt < 1.0 - EPS
}
