//! Capillary spherical caps in a half-space or a two-plane wedge: closed-form
//! geometry and clipped icosphere meshes.
//!
//! The cap of radius `R` is the part inside the wedge of the sphere centered
//! at `y + R k0`, with `y` on every plane (here `y` is the origin). Its
//! normal satisfies `<nu, N_i> = -cos(theta_i)` along the boundary on `P_i`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Point3, Vector3};
use serde::Serialize;

use super::mesh::TriMesh;
use super::shapes::icosphere_raw;
use super::smooth::SmoothCap;
use super::{CapillarySurface, SmoothBacking, SurfaceError, VertexTag, PLANE_TOL};
use crate::curvature::tangent_basis;
use crate::wedge::{dihedral_angle, solve_k0, CapillaryVector, ContactAngles, Wedge, ADMISSIBLE_TOL};

/// Smallest icosphere subdivision depth accepted for cap meshes.
pub const MIN_RESOLUTION: usize = 3;
/// Vertices closer than this fraction of the edge length to a plane are
/// snapped onto it before clipping, which keeps clipped triangles fat.
const SNAP_FRACTION: f64 = 0.3;

/// Parameters of a capillary spherical cap.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SphericalCap {
    pub center: Vector3<f64>,
    pub radius: f64,
    /// Foliation base point on every plane.
    pub base: Vector3<f64>,
    pub k0: Vector3<f64>,
    pub normals: Vec<Vector3<f64>>,
    pub thetas: Vec<f64>,
    /// Default icosphere depth used when meshing.
    pub resolution: usize,
}

/// Boundary arc on plane `plane`: `center + radius (cos s e1 + sin s e2)`
/// for `s` in `[s0, s1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub plane: usize,
    pub center: Vector3<f64>,
    pub radius: f64,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub s0: f64,
    pub s1: f64,
}

impl Arc {
    pub fn point(&self, s: f64) -> Vector3<f64> {
        self.center + (self.e1 * s.cos() + self.e2 * s.sin()) * self.radius
    }

    /// Unit tangent in the direction of increasing `s`.
    pub fn tangent(&self, s: f64) -> Vector3<f64> {
        self.e2 * s.cos() - self.e1 * s.sin()
    }

    pub fn is_full_circle(&self) -> bool {
        self.s1 - self.s0 >= 2.0 * PI - 1e-15
    }

    pub fn length(&self) -> f64 {
        self.radius * (self.s1 - self.s0)
    }

    /// Parameter of `p`'s projection if it falls inside the arc.
    fn param_of(&self, p: &Vector3<f64>) -> Option<f64> {
        let v = p - self.center;
        let (x, y) = (v.dot(&self.e1), v.dot(&self.e2));
        if x * x + y * y == 0.0 {
            return None;
        }
        let mut s = y.atan2(x);
        if s < self.s0 {
            s += 2.0 * PI;
        }
        (s <= self.s1).then_some(s)
    }
}

pub fn generate_cap(wedge: &Wedge, angles: &ContactAngles, radius: f64, resolution: usize) -> Result<CapillarySurface, SurfaceError> {
    if wedge.ambient_dim() != 3 {
        return Err(SurfaceError::NotThreeDimensional);
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(SurfaceError::InvalidRadius(radius));
    }
    if resolution < MIN_RESOLUTION {
        return Err(SurfaceError::InvalidResolution { got: resolution, min: MIN_RESOLUTION });
    }
    if wedge.plane_count() > 2 {
        return Err(SurfaceError::NotMeshable("caps are generated for one or two planes".into()));
    }
    let k0 = solve_k0(wedge, angles)?;
    check_admissible(wedge, angles, &k0)?;
    let normals = wedge.normals3()?;
    let thetas = angles.as_slice().to_vec();
    if normals.len() == 2 {
        // Some direction u must satisfy <u, N_i> < -cos(theta_i) for both i.
        let gap = normals[0].dot(&normals[1]).clamp(-1.0, 1.0).acos();
        if gap >= thetas[0] + thetas[1] - 1e-12 {
            return Err(SurfaceError::EmptyCap);
        }
    }
    let k = k0.vec3();
    let cap = SphericalCap { center: k * radius, radius, base: Vector3::zeros(), k0: k, normals, thetas, resolution };
    Ok(CapillarySurface::new_analytic(cap, wedge.clone(), angles.clone(), k0))
}

/// Rejects `|k0| > 1`; for two planes the message quotes the angle chain.
pub fn check_admissible(wedge: &Wedge, angles: &ContactAngles, k0: &CapillaryVector) -> Result<(), SurfaceError> {
    let n2 = k0.norm() * k0.norm();
    if n2 <= 1.0 + ADMISSIBLE_TOL {
        return Ok(());
    }
    let msg = if wedge.plane_count() == 2 {
        let a = dihedral_angle(wedge)?;
        let t = angles.as_slice();
        format!(
            "|k0|^2 = {:.6} > 1: the chain |pi - (theta1 + theta2)| <= alpha <= pi - |theta1 - theta2| fails ({:.6} <= {:.6} <= {:.6})",
            n2,
            (PI - (t[0] + t[1])).abs(),
            a,
            PI - (t[0] - t[1]).abs()
        )
    } else {
        format!("|k0|^2 = {n2:.6} > 1")
    };
    Err(SurfaceError::NotAdmissible(msg))
}

impl SphericalCap {
    pub fn plane_count(&self) -> usize {
        self.normals.len()
    }

    /// Length scale for relative tolerances.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn normal_at(&self, x: &Vector3<f64>) -> Vector3<f64> {
        (x - self.center) / self.radius
    }

    pub fn in_wedge(&self, x: &Vector3<f64>, tol: f64) -> bool {
        self.normals.iter().all(|n| n.dot(&(x - self.base)) <= tol)
    }

    /// Strictly inside the enclosed region.
    pub fn contains(&self, y: &Vector3<f64>) -> bool {
        self.normals.iter().all(|n| n.dot(&(y - self.base)) < 0.0) && (y - self.center).norm() < self.radius
    }

    pub fn scaled(&self, lambda: f64) -> SphericalCap {
        SphericalCap {
            center: self.center * lambda,
            radius: self.radius * lambda,
            base: self.base * lambda,
            ..self.clone()
        }
    }

    /// Circle `sphere ∩ P_i`: center and radius.
    pub fn plane_circle(&self, i: usize) -> (Vector3<f64>, f64) {
        let n = &self.normals[i];
        let h = n.dot(&(self.center - self.base));
        let rho = (self.radius * self.radius - h * h).max(0.0).sqrt();
        (self.center - n * h, rho)
    }

    /// Points where the sphere meets the edge `P_1 ∩ P_2`.
    pub fn edge_points(&self) -> Vec<Vector3<f64>> {
        if self.normals.len() != 2 {
            return Vec::new();
        }
        edge_points(&self.center, self.radius, &self.base, &self.normals[0], &self.normals[1])
    }

    /// Signed offset of plane `j`'s trace within the disk on plane `i`, in
    /// units of the disk radius: the disk part `<x, N_j> <= 0` is
    /// `<x - c_i, w> <= q rho` with `w` the unit in-plane direction of `N_j`.
    fn trace_offset(&self, i: usize, j: usize) -> (f64, Vector3<f64>) {
        let (ni, nj) = (&self.normals[i], &self.normals[j]);
        let (ci, rho) = self.plane_circle(i);
        let w = nj - ni * ni.dot(nj);
        let wn = w.norm();
        let a = nj.dot(&(ci - self.base));
        (-a / (rho * wn), w / wn)
    }

    /// Boundary arcs, one per plane that carries boundary.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        for i in 0..self.normals.len() {
            let (center, radius) = self.plane_circle(i);
            if self.normals.len() == 1 {
                let (e1, e2) = tangent_basis(&self.normals[0]);
                out.push(Arc { plane: 0, center, radius, e1, e2, s0: 0.0, s1: 2.0 * PI });
                continue;
            }
            let j = 1 - i;
            let (q, w) = self.trace_offset(i, j);
            if q <= -1.0 {
                continue;
            }
            let e2 = self.normals[i].cross(&w);
            let a = q.min(1.0).acos();
            out.push(Arc { plane: i, center, radius, e1: w, e2, s0: a, s1: 2.0 * PI - a });
        }
        out
    }

    /// Central angles of the boundary arcs per plane.
    fn arc_angles(&self) -> Vec<f64> {
        (0..self.normals.len())
            .map(|i| {
                if self.normals.len() == 1 {
                    return 2.0 * PI;
                }
                let (q, _) = self.trace_offset(i, 1 - i);
                2.0 * PI - 2.0 * q.clamp(-1.0, 1.0).acos()
            })
            .collect()
    }

    /// Surface area by Gauss-Bonnet: arcs of latitude have geodesic
    /// curvature `cot(theta)/R`, and each of the two corners on the edge
    /// turns by the angle between the projected plane normals.
    pub fn area(&self) -> f64 {
        let r2 = self.radius * self.radius;
        let th = &self.thetas;
        if self.normals.len() == 1 {
            return 2.0 * PI * r2 * (1.0 - th[0].cos());
        }
        let phi = self.arc_angles();
        let cos_alpha = -self.normals[0].dot(&self.normals[1]);
        let turn = (-(cos_alpha + th[0].cos() * th[1].cos()) / (th[0].sin() * th[1].sin())).clamp(-1.0, 1.0).acos();
        r2 * (2.0 * PI - th[0].cos() * phi[0] - th[1].cos() * phi[1] - 2.0 * turn)
    }

    /// Areas of the flat wetted regions `∂Ω ∩ P_i`.
    pub fn wetted_areas(&self) -> Vec<f64> {
        (0..self.normals.len())
            .map(|i| {
                let (_, rho) = self.plane_circle(i);
                if self.normals.len() == 1 {
                    return PI * rho * rho;
                }
                let (q, _) = self.trace_offset(i, 1 - i);
                disk_segment_area(rho, q * rho)
            })
            .collect()
    }

    /// `∫_Σ ν dA`, from closing `∂Ω` with the wetted regions.
    pub fn flux(&self) -> Vector3<f64> {
        let w = self.wetted_areas();
        -self.normals.iter().zip(&w).fold(Vector3::zeros(), |acc, (n, a)| acc + n * *a)
    }

    /// `∫_Σ <x, ν> dA`.
    pub fn position_flux(&self) -> f64 {
        self.radius * self.area() + self.center.dot(&self.flux())
    }

    /// `|Ω| = (1/3) ∫_Σ <x, ν> dA`; the wetted regions contribute nothing
    /// because their planes pass through the origin.
    pub fn volume(&self) -> f64 {
        self.position_flux() / 3.0
    }

    /// `∫_Σ (1 + <ν, k>) / H dA` with `H = 2/R`.
    pub fn hk_integral(&self, k: &Vector3<f64>) -> f64 {
        0.5 * self.radius * (self.area() + self.flux().dot(k))
    }

    /// `∫_Σ H_{r-1}(1 + <ν, k>) - H_r <x, ν> dA` with `H_r = R^{-r}`.
    pub fn minkowski_residual(&self, k: &Vector3<f64>, r: usize) -> f64 {
        let rr = self.radius;
        let a = self.area();
        let f = self.flux();
        rr.powi(1 - r as i32) * (a + f.dot(k)) - rr.powi(-(r as i32)) * (rr * a + self.center.dot(&f))
    }

    /// Nearest point of the cap to `p`.
    pub fn closest_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.extreme_point(p, false)
    }

    /// Farthest point of the cap from `p`.
    pub fn farthest_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.extreme_point(p, true)
    }

    fn extreme_point(&self, p: &Vector3<f64>, far: bool) -> Vector3<f64> {
        let d = p - self.center;
        let n = d.norm();
        let arcs = self.arcs();
        if n > 0.0 {
            let s = if far { -self.radius / n } else { self.radius / n };
            let q = self.center + d * s;
            if self.in_wedge(&q, 0.0) {
                return q;
            }
        }
        // The extremum of a linear function over a spherical region lies on
        // the region's boundary unless it is the free extremum.
        let mut cands = Vec::new();
        for arc in &arcs {
            let v = p - arc.center;
            let vp = v - self.normals[arc.plane] * v.dot(&self.normals[arc.plane]);
            let target = if far { arc.center - vp } else { arc.center + vp };
            if vp.norm() <= 1e-14 * self.radius.max(1.0) {
                // every point of the circle is equidistant from `p`
                cands.push(arc.point(arc.s0));
            } else if let Some(s) = arc.param_of(&target) {
                cands.push(arc.point(s));
            }
            if !arc.is_full_circle() {
                cands.push(arc.point(arc.s0));
                cands.push(arc.point(arc.s1));
            }
        }
        if cands.is_empty() {
            return self.center + self.normals.iter().fold(Vector3::zeros(), |a, n| a - n).normalize() * self.radius;
        }
        let key = |x: &Vector3<f64>| (x - p).norm();
        let mut best = cands[0];
        for c in &cands[1..] {
            if (far && key(c) > key(&best)) || (!far && key(c) < key(&best)) {
                best = *c;
            }
        }
        best
    }

    /// Axis-aligned bounds of the cap (sampled on the boundary and the sphere).
    pub fn bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        let mut add = |x: &Vector3<f64>| {
            for k in 0..3 {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        };
        for k in 0..3 {
            for s in [-1.0, 1.0] {
                let mut e = Vector3::zeros();
                e[k] = s;
                let q = self.center + e * self.radius;
                add(&self.closest_point(&q));
            }
        }
        for arc in self.arcs() {
            for m in 0..=256 {
                add(&arc.point(arc.s0 + (arc.s1 - arc.s0) * m as f64 / 256.0));
            }
        }
        (lo, hi)
    }
}

/// Area of the part `<x - c, w> <= delta` of a disk of radius `rho`.
pub fn disk_segment_area(rho: f64, delta: f64) -> f64 {
    if delta >= rho {
        return PI * rho * rho;
    }
    if delta <= -rho {
        return 0.0;
    }
    rho * rho * (PI - (delta / rho).acos()) + delta * (rho * rho - delta * delta).sqrt()
}

fn edge_points(c: &Vector3<f64>, r: f64, base: &Vector3<f64>, n1: &Vector3<f64>, n2: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let l = n1.cross(n2).normalize();
    let cc = c - base;
    let b = l.dot(&cc);
    let mut disc = b * b - cc.norm_squared() + r * r;
    if disc < 0.0 {
        if disc > -1e-12 * r * r {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let s = disc.sqrt();
    vec![base + l * (b - s), base + l * (b + s)]
}

/// Meshes the cap by clipping an icosphere of depth `depth` against each
/// plane in turn; boundary vertices are placed exactly on the circles
/// `sphere ∩ P_i` or at the edge points.
pub(crate) fn mesh_cap(
    cap: &SphericalCap,
    wedge: &Wedge,
    angles: &ContactAngles,
    k0: &CapillaryVector,
    depth: usize,
) -> Result<CapillarySurface, SurfaceError> {
    if depth < MIN_RESOLUTION {
        return Err(SurfaceError::InvalidResolution { got: depth, min: MIN_RESOLUTION });
    }
    let (mesh, masks) = clip_sphere(cap, depth)?;
    let tags = tags_from_masks(&mesh, &masks, cap)?;
    let dirs = mesh.vertices().iter().map(|p| ((p.coords - cap.center) / cap.radius).normalize()).collect();
    let backing = SmoothBacking { smooth: SmoothCap::exact(cap.clone()), dirs };
    Ok(CapillarySurface::new_mesh(mesh, tags, Some(backing), wedge.clone(), angles.clone(), k0.clone()))
}

struct Clipper<'a> {
    cap: &'a SphericalCap,
    pos: Vec<Vector3<f64>>,
    mask: Vec<u8>,
}

impl Clipper<'_> {
    /// Closest point to `p` on the sphere intersected with the planes in `mask`.
    fn project(&self, p: &Vector3<f64>, mask: u8) -> Option<Vector3<f64>> {
        let cap = self.cap;
        let planes: Vec<&Vector3<f64>> = (0..cap.normals.len()).filter(|i| mask & (1 << i) != 0).map(|i| &cap.normals[i]).collect();
        match planes.len() {
            0 => {
                let d = p - cap.center;
                let n = d.norm();
                (n > 0.0).then(|| cap.center + d * (cap.radius / n))
            }
            1 => {
                let n = planes[0];
                let h = n.dot(&(cap.center - cap.base));
                let rho2 = cap.radius * cap.radius - h * h;
                if rho2 <= 0.0 {
                    return None;
                }
                let cc = cap.center - n * h;
                let v = p - n * n.dot(&(p - cap.base)) - cc;
                let vn = v.norm();
                (vn > 0.0).then(|| cc + v * (rho2.sqrt() / vn))
            }
            _ => {
                let pts = edge_points(&cap.center, cap.radius, &cap.base, planes[0], planes[1]);
                pts.into_iter().min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm()))
            }
        }
    }
}

fn clip_sphere(cap: &SphericalCap, depth: usize) -> Result<(TriMesh, Vec<u8>), SurfaceError> {
    let (dirs, mut faces) = icosphere_raw(depth);
    let r = cap.radius;
    let h = r * (dirs[faces[0][0]] - dirs[faces[0][1]]).norm();
    let snap = SNAP_FRACTION * h;
    let mut cl = Clipper { cap, pos: dirs.iter().map(|u| cap.center + u * r).collect(), mask: vec![0; dirs.len()] };

    for (i, nrm) in cap.normals.iter().enumerate() {
        let bit = 1u8 << i;
        let mut used = vec![false; cl.pos.len()];
        for f in &faces {
            for &v in f {
                used[v] = true;
            }
        }
        for v in 0..cl.pos.len() {
            if !used[v] || cl.mask[v] != 0 {
                continue;
            }
            let d = nrm.dot(&(cl.pos[v] - cap.base));
            if d.abs() < snap {
                if let Some(t) = cl.project(&cl.pos[v], bit) {
                    if (t - cl.pos[v]).norm() < 2.0 * snap {
                        cl.pos[v] = t;
                        cl.mask[v] = bit;
                    }
                }
            }
        }
        // A single vertex already on an earlier plane moves to each edge point.
        for j in 0..i {
            let pts = edge_points(&cap.center, r, &cap.base, &cap.normals[j], nrm);
            for e in pts {
                let best = (0..cl.pos.len())
                    .filter(|&v| used[v] && cl.mask[v] == 1 << j)
                    .min_by(|&a, &b| (cl.pos[a] - e).norm().total_cmp(&(cl.pos[b] - e).norm()));
                if let Some(v) = best {
                    if (cl.pos[v] - e).norm() < snap {
                        cl.pos[v] = e;
                        cl.mask[v] |= bit;
                    }
                }
            }
        }
        let d: Vec<f64> = (0..cl.pos.len())
            .map(|v| if cl.mask[v] & bit != 0 { 0.0 } else { nrm.dot(&(cl.pos[v] - cap.base)) })
            .collect();

        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out = Vec::with_capacity(faces.len());
        for f in &faces {
            let dv = [d[f[0]], d[f[1]], d[f[2]]];
            if !dv.iter().any(|&x| x < 0.0) {
                continue;
            }
            if dv.iter().all(|&x| x <= 0.0) {
                out.push(*f);
                continue;
            }
            let mut poly: Vec<usize> = Vec::with_capacity(4);
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if d[a] <= 0.0 {
                    poly.push(a);
                }
                if (d[a] < 0.0 && d[b] > 0.0) || (d[a] > 0.0 && d[b] < 0.0) {
                    let key = (a.min(b), a.max(b));
                    let idx = match cache.get(&key) {
                        Some(&idx) => idx,
                        None => {
                            let t = d[a] / (d[a] - d[b]);
                            let p = cl.pos[a] + (cl.pos[b] - cl.pos[a]) * t;
                            let m = (cl.mask[a] & cl.mask[b]) | bit;
                            let q = cl.project(&p, m).or_else(|| cl.project(&p, bit)).unwrap_or(p);
                            let m = if cl.project(&p, m).is_some() { m } else { bit };
                            cl.pos.push(q);
                            cl.mask.push(m);
                            cache.insert(key, cl.pos.len() - 1);
                            cl.pos.len() - 1
                        }
                    };
                    poly.push(idx);
                }
            }
            match poly.len() {
                3 => out.push([poly[0], poly[1], poly[2]]),
                4 => {
                    let p = |k: usize| cl.pos[poly[k]];
                    if (p(0) - p(2)).norm() <= (p(1) - p(3)).norm() {
                        out.push([poly[0], poly[1], poly[2]]);
                        out.push([poly[0], poly[2], poly[3]]);
                    } else {
                        out.push([poly[1], poly[2], poly[3]]);
                        out.push([poly[1], poly[3], poly[0]]);
                    }
                }
                _ => {}
            }
        }
        faces = out;
    }

    // Weld coincident edge-point vertices and drop the faces they collapse.
    let tol = 1e-12 * r;
    let mut weld: Vec<usize> = (0..cl.pos.len()).collect();
    let edge_verts: Vec<usize> = (0..cl.pos.len()).filter(|&v| cl.mask[v].count_ones() >= 2).collect();
    for (k, &a) in edge_verts.iter().enumerate() {
        for &b in &edge_verts[..k] {
            if weld[b] == b && (cl.pos[a] - cl.pos[b]).norm() <= tol {
                weld[a] = b;
                break;
            }
        }
    }
    let faces: Vec<[usize; 3]> = faces
        .into_iter()
        .map(|f| [weld[f[0]], weld[f[1]], weld[f[2]]])
        .filter(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
        .collect();

    // Compact to the used vertices.
    let mut remap = vec![usize::MAX; cl.pos.len()];
    let mut verts = Vec::new();
    let mut masks = Vec::new();
    let mut faces_out = Vec::with_capacity(faces.len());
    for f in &faces {
        let mut g = [0usize; 3];
        for k in 0..3 {
            let v = f[k];
            if remap[v] == usize::MAX {
                remap[v] = verts.len();
                verts.push(Point3::from(cl.pos[v]));
                masks.push(cl.mask[v]);
            }
            g[k] = remap[v];
        }
        faces_out.push(g);
    }
    if faces_out.is_empty() {
        return Err(SurfaceError::EmptyCap);
    }
    let mesh = TriMesh::new(verts, faces_out)?;
    for f in 0..mesh.face_count() {
        if mesh.face_cross(f).dot(&(mesh.face_centroid(f).coords - cap.center)) <= 0.0 {
            return Err(SurfaceError::NotMeshable(format!("clipping inverted face {f}")));
        }
    }
    Ok((mesh, masks))
}

fn tags_from_masks(mesh: &TriMesh, masks: &[u8], cap: &SphericalCap) -> Result<Vec<VertexTag>, SurfaceError> {
    let tol = PLANE_TOL * cap.diameter().max(1.0);
    let mut tags = Vec::with_capacity(masks.len());
    for (v, &m) in masks.iter().enumerate() {
        if !mesh.is_boundary(v) {
            tags.push(VertexTag::Interior);
            continue;
        }
        let p = mesh.vertex(v).coords - cap.base;
        for i in 0..cap.normals.len() {
            if m & (1 << i) != 0 && cap.normals[i].dot(&p).abs() > tol {
                return Err(SurfaceError::UnassignedBoundary { vertex: v, distance: cap.normals[i].dot(&p).abs() });
            }
        }
        tags.push(match m.count_ones() {
            0 => {
                let distance = cap.normals.iter().map(|n| n.dot(&p).abs()).fold(f64::INFINITY, f64::min);
                return Err(SurfaceError::UnassignedBoundary { vertex: v, distance });
            }
            1 => VertexTag::Plane(m.trailing_zeros() as usize),
            _ => VertexTag::Edge,
        });
    }
    Ok(tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn half(theta: f64) -> SphericalCap {
        let w = Wedge::half_space(3).unwrap();
        let s = generate_cap(&w, &ContactAngles::new(vec![theta]).unwrap(), 1.0, 3).unwrap();
        s.as_cap().unwrap().clone()
    }

    fn wedge_cap(t1: f64, t2: f64, alpha: f64) -> SphericalCap {
        let w = Wedge::classical(alpha).unwrap();
        let s = generate_cap(&w, &ContactAngles::new(vec![t1, t2]).unwrap(), 1.0, 3).unwrap();
        s.as_cap().unwrap().clone()
    }

    #[test]
    fn hemisphere_closed_forms() {
        let c = half(PI / 2.0);
        assert_relative_eq!(c.area(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(c.volume(), 2.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(c.plane_circle(0).1, 1.0);
        assert_eq!(c.minkowski_residual(&c.k0, 1), 0.0);
    }

    #[test]
    fn two_thirds_pi_cap() {
        let c = half(2.0 * PI / 3.0);
        assert_relative_eq!(c.area(), 3.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(c.volume(), 9.0 * PI / 8.0, max_relative = 1e-14);
        assert_relative_eq!(c.plane_circle(0).1, 3f64.sqrt() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(c.hk_integral(&c.k0), 27.0 * PI / 16.0, max_relative = 1e-14);
    }

    #[test]
    fn quarter_sphere() {
        let c = wedge_cap(PI / 2.0, PI / 2.0, PI / 2.0);
        assert_relative_eq!(c.area(), PI, max_relative = 1e-14);
        assert_relative_eq!(c.volume(), PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(c.hk_integral(&c.k0), PI / 2.0, max_relative = 1e-14);
        assert_eq!(c.edge_points().len(), 2);
    }

    #[test]
    fn segment_area_limits() {
        assert_relative_eq!(disk_segment_area(2.0, 0.0), 2.0 * PI);
        assert_eq!(disk_segment_area(2.0, -3.0), 0.0);
        assert_relative_eq!(disk_segment_area(2.0, 2.0), 4.0 * PI);
    }

    #[test]
    fn closest_point_cases() {
        let c = half(PI / 2.0);
        let p = Vector3::new(0.0, 0.0, 0.3);
        assert_relative_eq!(c.closest_point(&p), Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
        // below the plane: nearest is on the rim
        let q = c.closest_point(&Vector3::new(0.5, 0.0, -2.0));
        assert_relative_eq!(q, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        let f = c.farthest_point(&Vector3::new(0.0, 0.0, 0.5));
        assert!((f - Vector3::new(0.0, 0.0, 0.5)).norm() > 1.1);
    }

    #[test]
    fn inadmissible_rejected() {
        let w = Wedge::classical(PI / 6.0).unwrap();
        let err = generate_cap(&w, &ContactAngles::new(vec![0.3, 0.3]).unwrap(), 1.0, 3).unwrap_err();
        match err {
            SurfaceError::NotAdmissible(m) => assert!(m.contains("theta1 + theta2")),
            e => panic!("unexpected {e}"),
        }
    }
}
