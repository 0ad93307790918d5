//! Reference meshes: icosahedron, icospheres, ellipsoids, open cylinders and
//! flat grids.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::mesh::TriMesh;
use super::MeshError;

/// Unit-circumradius icosahedron: vertices and outward CCW faces.
pub fn icosahedron_raw() -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let v: Vec<Vector3<f64>> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vector3::new(p[0], p[1], p[2]).normalize())
    .collect();
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (v, f)
}

pub fn icosahedron() -> Result<TriMesh, MeshError> {
    let (v, f) = icosahedron_raw();
    TriMesh::new(v.into_iter().map(Point3::from).collect(), f)
}

/// Unit-sphere directions and faces after `depth` rounds of 4-to-1
/// subdivision with midpoints pushed to the sphere.
pub fn icosphere_raw(depth: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let (mut v, mut f) = icosahedron_raw();
    for _ in 0..depth {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(f.len() * 3 / 2);
        let mut nf = Vec::with_capacity(f.len() * 4);
        let mut midpoint = |a: usize, b: usize, v: &mut Vec<Vector3<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                v.push(((v[a] + v[b]) * 0.5).normalize());
                v.len() - 1
            })
        };
        for t in &f {
            let ab = midpoint(t[0], t[1], &mut v);
            let bc = midpoint(t[1], t[2], &mut v);
            let ca = midpoint(t[2], t[0], &mut v);
            nf.push([t[0], ab, ca]);
            nf.push([t[1], bc, ab]);
            nf.push([t[2], ca, bc]);
            nf.push([ab, bc, ca]);
        }
        f = nf;
    }
    (v, f)
}

pub fn icosphere(depth: usize, center: Vector3<f64>, radius: f64) -> Result<TriMesh, MeshError> {
    let (v, f) = icosphere_raw(depth);
    TriMesh::new(v.into_iter().map(|u| Point3::from(center + u * radius)).collect(), f)
}

/// Axis-aligned ellipsoid with semi-axes `(a, b, c)`.
pub fn ellipsoid(depth: usize, axes: [f64; 3]) -> Result<TriMesh, MeshError> {
    let (v, f) = icosphere_raw(depth);
    TriMesh::new(v.into_iter().map(|u| Point3::new(u.x * axes[0], u.y * axes[1], u.z * axes[2])).collect(), f)
}

/// Open cylinder of the given radius around the z axis, `z` in
/// `[-height/2, height/2]`, normals pointing away from the axis.
pub fn cylinder(radius: f64, height: f64, segments: usize, rings: usize) -> Result<TriMesh, MeshError> {
    let mut v = Vec::with_capacity(segments * (rings + 1));
    for j in 0..=rings {
        let z = -height / 2.0 + height * j as f64 / rings as f64;
        // staggered rows give a better conditioned triangulation
        let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
        for i in 0..segments {
            let a = 2.0 * std::f64::consts::PI * (i as f64 + shift) / segments as f64;
            v.push(Point3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let idx = |i: usize, j: usize| j * segments + i % segments;
    let mut f = Vec::with_capacity(2 * segments * rings);
    for j in 0..rings {
        for i in 0..segments {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if j % 2 == 0 {
                f.push([a, b, d]);
                f.push([b, c, d]);
            } else {
                f.push([a, b, c]);
                f.push([a, c, d]);
            }
        }
    }
    TriMesh::new(v, f)
}

/// Flat `n x n` grid of the square `[-1,1]^2` in the plane `z = 0`, normal +z.
pub fn flat_grid(n: usize) -> Result<TriMesh, MeshError> {
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push(Point3::new(-1.0 + 2.0 * i as f64 / n as f64, -1.0 + 2.0 * j as f64 / n as f64, 0.0));
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut f = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            f.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            f.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    TriMesh::new(v, f)
}

/// Flat disk of radius `radius` in the plane through the origin with normal
/// `normal`, as rings of triangles around the center.
pub fn flat_disk(radius: f64, normal: Vector3<f64>, rings: usize) -> Result<TriMesh, MeshError> {
    let n = normal.normalize();
    let (e1, e2) = crate::curvature::tangent_basis(&n);
    let mut v = vec![Point3::origin()];
    let mut start = vec![0usize];
    for r in 1..=rings {
        start.push(v.len());
        let m = 6 * r;
        for i in 0..m {
            let a = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            let rho = radius * r as f64 / rings as f64;
            v.push(Point3::from((e1 * a.cos() + e2 * a.sin()) * rho));
        }
    }
    let mut f = Vec::new();
    for i in 0..6 {
        f.push([0, start[1] + i, start[1] + (i + 1) % 6]);
    }
    for r in 2..=rings {
        let (m_in, m_out) = (6 * (r - 1), 6 * r);
        let inner = |i: usize| start[r - 1] + i % m_in;
        let outer = |o: usize| start[r] + o % m_out;
        // merge the two rings by angle
        let (mut i, mut o) = (0usize, 0usize);
        while i < m_in || o < m_out {
            let next_in = (i + 1) as f64 / m_in as f64;
            let next_out = (o + 1) as f64 / m_out as f64;
            if i >= m_in || (o < m_out && next_out <= next_in) {
                f.push([inner(i), outer(o), outer(o + 1)]);
                o += 1;
            } else {
                f.push([inner(i), outer(o), inner(i + 1)]);
                i += 1;
            }
        }
    }
    TriMesh::new(v, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for d in 0..4 {
            let m = icosphere(d, Vector3::zeros(), 1.0).unwrap();
            assert_eq!(m.face_count(), 20 * 4usize.pow(d as u32));
            assert_eq!(m.vertex_count(), 10 * 4usize.pow(d as u32) + 2);
            assert!(m.is_closed());
            assert_eq!(m.euler_characteristic(), 2);
        }
    }

    #[test]
    fn icosahedron_is_outward() {
        let m = icosahedron().unwrap();
        for f in 0..m.face_count() {
            assert!(m.face_normal(f).dot(&m.face_centroid(f).coords) > 0.0);
        }
    }

    #[test]
    fn open_shapes_have_boundaries() {
        let c = cylinder(1.0, 2.0, 24, 8).unwrap();
        assert_eq!(c.boundary_loops().len(), 2);
        assert_eq!(c.euler_characteristic(), 0);
        let g = flat_grid(4).unwrap();
        assert_eq!(g.boundary_loops().len(), 1);
        let d = flat_disk(1.0, Vector3::z(), 5).unwrap();
        assert_eq!(d.boundary_loops().len(), 1);
        assert_eq!(d.euler_characteristic(), 1);
        for f in 0..d.face_count() {
            assert!(d.face_normal(f).z > 0.0);
        }
    }
}
