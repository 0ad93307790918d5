//! Principal curvatures, normalized higher mean curvatures, the curvature
//! polynomial and its evolution along parallel surfaces.
//!
//! Sign convention: the shape operator is taken with respect to the outward
//! normal, so a round sphere has positive principal curvatures.

use nalgebra::{DMatrix, DVector, Matrix2, Point3, SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::surface::mesh::TriMesh;

/// Distance from the sphere above which a point is rejected as off-surface.
pub const ON_SURFACE_TOL: f64 = 1e-9;
/// `|1 + t*kappa|` below this is treated as a focal point.
pub const FOCAL_TOL: f64 = 1e-12;
/// Ratio of extreme singular values above which a quadric fit is rejected.
pub const MAX_FIT_CONDITION: f64 = 1e10;
/// Minimum neighborhood size of a quadric fit.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CurvatureError {
    #[error("point is {0:e} away from the surface")]
    OffSurface(f64),
    #[error("vertex {vertex} has only {found} neighbors for a quadric fit")]
    InsufficientNeighborhood { vertex: usize, found: usize },
    #[error("quadric fit at vertex {vertex} is ill-conditioned (condition {condition:e})")]
    IllConditionedFit { vertex: usize, condition: f64 },
    #[error("1 + t*kappa = {0:e} vanishes: focal point")]
    FocalSingularity(f64),
    #[error("curvature list is empty")]
    Empty,
}

/// Curvature data at one surface point.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CurvatureData {
    pub normal: Vector3<f64>,
    /// Principal curvatures, descending.
    pub kappas: Vec<f64>,
    /// Principal directions matching `kappas`, orthonormal and tangent.
    pub directions: Vec<Vector3<f64>>,
    /// Unnormalized mean curvature, the sum of the principal curvatures.
    pub mean: f64,
    /// Normalized higher mean curvatures `H_0..H_n`.
    pub higher: Vec<f64>,
}

impl CurvatureData {
    pub fn from_principal(normal: Vector3<f64>, kappas: Vec<f64>, directions: Vec<Vector3<f64>>) -> Self {
        let mean = kappas.iter().sum();
        let higher = higher_mean(&kappas);
        CurvatureData { normal, kappas, directions, mean, higher }
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappas[0]
    }

    pub fn kappa_min(&self) -> f64 {
        self.kappas[self.kappas.len() - 1]
    }

    /// Normalized `H_r`.
    pub fn h(&self, r: usize) -> f64 {
        self.higher[r]
    }

    /// Second fundamental form applied to a pair of tangent vectors.
    pub fn second_form(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        self.kappas
            .iter()
            .zip(&self.directions)
            .map(|(k, e)| k * a.dot(e) * b.dot(e))
            .sum()
    }
}

pub fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    let mut c = 1.0;
    for i in 0..r {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Elementary symmetric polynomials `e_0..e_n`.
pub fn elementary_symmetric(kappas: &[f64]) -> Vec<f64> {
    let n = kappas.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (j, &k) in kappas.iter().enumerate() {
        for r in (1..=j + 1).rev() {
            e[r] += k * e[r - 1];
        }
    }
    e
}

/// Normalized higher mean curvatures `H_r = e_r / C(n, r)`, `H_0 = 1`.
pub fn higher_mean(kappas: &[f64]) -> Vec<f64> {
    let n = kappas.len();
    elementary_symmetric(kappas)
        .into_iter()
        .enumerate()
        .map(|(r, e)| e / binomial(n, r))
        .collect()
}

/// `P_n(t) = prod (1 + t kappa_i)`.
pub fn pn_eval(kappas: &[f64], t: f64) -> f64 {
    kappas.iter().map(|k| 1.0 + t * k).product()
}

/// `P_n(t)` through its expansion `sum C(n,i) H_i t^i`, Horner form.
pub fn pn_eval_binomial(kappas: &[f64], t: f64) -> f64 {
    let n = kappas.len();
    let h = higher_mean(kappas);
    (0..=n).rev().fold(0.0, |acc, i| acc * t + binomial(n, i) * h[i])
}

/// `P_n'(t)` from the expansion.
pub fn pn_derivative(kappas: &[f64], t: f64) -> f64 {
    let n = kappas.len();
    let h = higher_mean(kappas);
    (1..=n).rev().fold(0.0, |acc, i| acc * t + i as f64 * binomial(n, i) * h[i])
}

/// Principal curvatures and mean curvature of the parallel surface at
/// signed distance `t` along the outward normal.
pub fn parallel_curvature(kappas: &[f64], t: f64) -> Result<(Vec<f64>, f64), CurvatureError> {
    let mut out = Vec::with_capacity(kappas.len());
    for &k in kappas {
        let d = 1.0 + t * k;
        if d.abs() < FOCAL_TOL {
            return Err(CurvatureError::FocalSingularity(d));
        }
        out.push(k / d);
    }
    let h = out.iter().sum();
    Ok((out, h))
}

/// Curvature of a round sphere at a point; the sphere is given by center and
/// radius, `n = 2`.
pub fn curvature_sphere(center: &Vector3<f64>, radius: f64, x: &Vector3<f64>) -> Result<CurvatureData, CurvatureError> {
    let d = x - center;
    let off = (d.norm() - radius).abs();
    if off > ON_SURFACE_TOL * radius.max(1.0) {
        return Err(CurvatureError::OffSurface(off));
    }
    let nu = d / d.norm();
    let (e1, e2) = tangent_basis(&nu);
    let k = 1.0 / radius;
    Ok(CurvatureData::from_principal(nu, vec![k, k], vec![e1, e2]))
}

/// Orthonormal pair completing `n` to a right-handed frame.
pub fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let a = if n.x.abs() < 0.6 { Vector3::x() } else if n.y.abs() < 0.6 { Vector3::y() } else { Vector3::z() };
    let e1 = (a - n * n.dot(&a)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Quadric-fit curvature at a mesh vertex.
///
/// Fits `w = a u^2 + b uv + c v^2 + d u + e v` in a tangent frame built from
/// the area-weighted vertex normal, over the 2-ring (3-ring for sparse
/// boundary stencils). The normal orientation follows the face orientation.
pub fn curvature_mesh(mesh: &TriMesh, vertex: usize) -> Result<CurvatureData, CurvatureError> {
    let mut ring = mesh.ring(vertex, 2);
    if mesh.is_boundary(vertex) && ring.len() < 9 {
        ring = mesh.ring(vertex, 3);
    }
    if ring.len() < MIN_FIT_POINTS {
        return Err(CurvatureError::InsufficientNeighborhood { vertex, found: ring.len() });
    }
    let p = mesh.vertex(vertex);
    let n0 = mesh.vertex_normal(vertex);
    fit_quadric(vertex, &p, &n0, ring.iter().map(|&j| mesh.vertex(j)))
}

fn fit_quadric(
    vertex: usize,
    p: &Point3<f64>,
    n0: &Vector3<f64>,
    pts: impl Iterator<Item = Point3<f64>>,
) -> Result<CurvatureData, CurvatureError> {
    let (t1, t2) = tangent_basis(n0);
    let local: Vec<[f64; 3]> = pts
        .map(|q| {
            let d = q - p;
            [d.dot(&t1), d.dot(&t2), d.dot(n0)]
        })
        .collect();
    let m = local.len();
    let scale = local.iter().map(|l| (l[0] * l[0] + l[1] * l[1]).sqrt()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(CurvatureError::IllConditionedFit { vertex, condition: f64::INFINITY });
    }
    // columns scaled by the stencil radius for conditioning
    let mut a = DMatrix::zeros(m, 5);
    let mut rhs = DVector::zeros(m);
    for (i, l) in local.iter().enumerate() {
        let (u, v) = (l[0] / scale, l[1] / scale);
        a[(i, 0)] = u * u;
        a[(i, 1)] = u * v;
        a[(i, 2)] = v * v;
        a[(i, 3)] = u;
        a[(i, 4)] = v;
        rhs[i] = l[2] / scale;
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < MAX_FIT_CONDITION) {
        return Err(CurvatureError::IllConditionedFit { vertex, condition });
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|_| CurvatureError::IllConditionedFit { vertex, condition })?;
    let (qa, qb, qc) = (coef[0] / scale, coef[1] / scale, coef[2] / scale);
    let (gd, ge) = (coef[3], coef[4]);

    // Graph w(u,v): tangent vectors, upward unit normal, fundamental forms.
    let xu = t1 + n0 * gd;
    let xv = t2 + n0 * ge;
    let w = (1.0 + gd * gd + ge * ge).sqrt();
    let nu = (n0 - t1 * gd - t2 * ge) / w;
    let first = Matrix2::new(1.0 + gd * gd, gd * ge, gd * ge, 1.0 + ge * ge);
    // outward normal points along +w, so the sphere bends away: negate
    let second = -Matrix2::new(2.0 * qa, qb, qb, 2.0 * qc) / w;
    from_fundamental_forms(nu, xu, xv, first, second).ok_or(CurvatureError::IllConditionedFit { vertex, condition })
}

/// Principal data from the first and second fundamental forms in the
/// tangent basis `(xu, xv)`; `None` if the first form is not positive
/// definite.
pub fn from_fundamental_forms(
    normal: Vector3<f64>,
    xu: Vector3<f64>,
    xv: Vector3<f64>,
    first: Matrix2<f64>,
    second: Matrix2<f64>,
) -> Option<CurvatureData> {
    // Generalized symmetric problem II x = k I x via Cholesky of I.
    let l = first.cholesky()?;
    let linv = l.l().try_inverse()?;
    let second = (second + second.transpose()) * 0.5;
    let sym = linv * second * linv.transpose();
    let sym = (sym + sym.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let (i0, i1) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let y = eig.eigenvectors.column(i0).into_owned();
    let x = linv.transpose() * y;
    let d0 = xu * x[0] + xv * x[1];
    let d0 = (d0 - normal * normal.dot(&d0)).normalize();
    let d1 = normal.cross(&d0);
    Some(CurvatureData::from_principal(normal, vec![eig.eigenvalues[i0], eig.eigenvalues[i1]], vec![d0, d1]))
}

/// Quadric-fit curvature at every vertex, in parallel.
pub fn curvature_field(mesh: &TriMesh) -> Result<Vec<CurvatureData>, CurvatureError> {
    (0..mesh.vertex_count()).into_par_iter().map(|v| curvature_mesh(mesh, v)).collect()
}
