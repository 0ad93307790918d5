//! Indexed triangle meshes with boundary.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use serde::Serialize;

use super::MeshError;

/// Faces below this area are rejected as degenerate.
pub const MIN_FACE_AREA: f64 = 1e-14;

/// Oriented, edge-manifold triangle mesh. Faces are CCW seen from the
/// outward side. Immutable after construction.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    vertex_faces: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    boundary_loops: Vec<Vec<usize>>,
    on_boundary: Vec<bool>,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MeshStats {
    pub vertices: usize,
    pub faces: usize,
    pub boundary_loops: usize,
    pub mean_edge: f64,
    pub max_edge: f64,
    pub diameter: f64,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= nv {
                    return Err(MeshError::IndexOutOfRange { face: fi, index: v, vertices: nv });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::DegenerateFace { face: fi, area: 0.0 });
            }
            let area = tri_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
            if !(area > MIN_FACE_AREA) {
                return Err(MeshError::DegenerateFace { face: fi, area });
            }
        }

        // Directed edges must be unique; an undirected edge is shared by at
        // most two faces with opposite orientation.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(faces.len() * 3);
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let e = (f[k], f[(k + 1) % 3]);
                if directed.insert(e, fi).is_some() {
                    return Err(MeshError::NonManifold { a: e.0, b: e.1 });
                }
            }
        }

        let mut vertex_faces = vec![Vec::new(); nv];
        let mut neighbors = vec![Vec::new(); nv];
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                vertex_faces[f[k]].push(fi);
                neighbors[f[k]].push(f[(k + 1) % 3]);
                neighbors[f[k]].push(f[(k + 2) % 3]);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }

        // Boundary half-edges run with the surface on their left.
        let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut on_boundary = vec![false; nv];
        let mut boundary_edges: Vec<(usize, usize)> = directed
            .keys()
            .filter(|(a, b)| !directed.contains_key(&(*b, *a)))
            .copied()
            .collect();
        boundary_edges.sort_unstable();
        for &(a, b) in &boundary_edges {
            next.entry(a).or_default().push(b);
            on_boundary[a] = true;
            on_boundary[b] = true;
        }
        for v in next.values_mut() {
            v.sort_unstable_by(|x, y| y.cmp(x));
        }
        let mut boundary_loops = Vec::new();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for s in starts {
            while next.get(&s).is_some_and(|v| !v.is_empty()) {
                let mut lp = vec![s];
                let mut cur = next.get_mut(&s).and_then(|v| v.pop()).ok_or(MeshError::OpenLoop(s))?;
                while cur != s {
                    lp.push(cur);
                    cur = next.get_mut(&cur).and_then(|v| v.pop()).ok_or(MeshError::OpenLoop(cur))?;
                }
                boundary_loops.push(lp);
            }
        }

        Ok(TriMesh { vertices, faces, vertex_faces, neighbors, boundary_loops, on_boundary })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex(&self, i: usize) -> Point3<f64> {
        self.vertices[i]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// One-ring vertex neighbors, sorted.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Closed boundary cycles, each oriented with the surface on its left.
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let edges = self.faces.len() * 3;
        let boundary: usize = self.boundary_loops.iter().map(|l| l.len()).sum();
        // interior edges counted twice, boundary edges once
        let e = (edges - boundary) / 2 + boundary;
        self.vertices.len() as i64 - e as i64 + self.faces.len() as i64
    }

    /// Unnormalized face normal (length = 2 * area).
    pub fn face_cross(&self, f: usize) -> Vector3<f64> {
        let [a, b, c] = self.faces[f];
        (self.vertices[b] - self.vertices[a]).cross(&(self.vertices[c] - self.vertices[a]))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    pub fn face_normal(&self, f: usize) -> Vector3<f64> {
        self.face_cross(f).normalize()
    }

    pub fn face_centroid(&self, f: usize) -> Point3<f64> {
        let [a, b, c] = self.faces[f];
        Point3::from((self.vertices[a].coords + self.vertices[b].coords + self.vertices[c].coords) / 3.0)
    }

    /// Area-weighted vertex normal.
    pub fn vertex_normal(&self, v: usize) -> Vector3<f64> {
        let mut n = Vector3::zeros();
        for &f in &self.vertex_faces[v] {
            n += self.face_cross(f);
        }
        n.normalize()
    }

    /// Vertices within `rings` edge hops of `v`, excluding `v`.
    pub fn ring(&self, v: usize, rings: usize) -> Vec<usize> {
        let mut seen = vec![v];
        let mut frontier = vec![v];
        for _ in 0..rings {
            let mut nxt = Vec::new();
            for &u in &frontier {
                for &w in &self.neighbors[u] {
                    if !seen.contains(&w) {
                        seen.push(w);
                        nxt.push(w);
                    }
                }
            }
            frontier = nxt;
        }
        seen.remove(0);
        seen
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| (f[k], f[(k + 1) % 3])))
            .filter(move |&(a, b)| a < b || !self.has_directed_edge(b, a))
    }

    fn has_directed_edge(&self, a: usize, b: usize) -> bool {
        self.vertex_faces[a].iter().any(|&f| {
            let t = self.faces[f];
            (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b)
        })
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Bounding-box diagonal, used as the length scale for tolerances.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi - lo).norm()
    }

    pub fn stats(&self) -> MeshStats {
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        let mut count = 0usize;
        for (a, b) in self.edges() {
            let l = (self.vertices[a] - self.vertices[b]).norm();
            sum += l;
            max = max.max(l);
            count += 1;
        }
        MeshStats {
            vertices: self.vertex_count(),
            faces: self.face_count(),
            boundary_loops: self.boundary_loops.len(),
            mean_edge: sum / count.max(1) as f64,
            max_edge: max,
            diameter: self.diameter(),
        }
    }

    /// Copy with every vertex transformed; connectivity is kept.
    pub fn map_vertices(&self, f: impl Fn(usize, &Point3<f64>) -> Point3<f64>) -> Result<TriMesh, MeshError> {
        let verts = self.vertices.iter().enumerate().map(|(i, p)| f(i, p)).collect();
        TriMesh::new(verts, self.faces.clone())
    }
}

pub(crate) fn tri_area(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
