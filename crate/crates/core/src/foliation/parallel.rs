//! Parallel map, Jacobian, time domain and the volume chain
//! `|Ω| ≤ ∫_Z J ≤ ∫ AM-GM bound ≤ (2/3) ∫ (1 + <ν, k0>)/H`.

use nalgebra::Vector3;
use serde::Serialize;

use super::FoliationError;
use crate::curvature::{curvature_sphere, CurvatureData};
use crate::integrals::{enclosed_volume, integrate_vertex_field, IntegralError};
use crate::surface::{CapillarySurface, SurfaceKind};
use crate::wedge::CapillaryVector;

/// `t_max(x) = 1/κ_1(x)` (infinite where `κ_1 <= 0`).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ParallelDomain {
    pub t_max: Vec<f64>,
}

impl ParallelDomain {
    pub fn from_curvature(curv: &[CurvatureData]) -> Self {
        ParallelDomain { t_max: curv.iter().map(|c| time_bound(c.kappa_max())).collect() }
    }

    pub fn contains(&self, v: usize, t: f64) -> bool {
        t > 0.0 && t <= self.t_max[v]
    }
}

pub fn time_bound(kappa_max: f64) -> f64 {
    if kappa_max > 0.0 {
        1.0 / kappa_max
    } else {
        f64::INFINITY
    }
}

/// `x − t(ν + k0)` for given normal.
pub fn zeta_at(x: &Vector3<f64>, nu: &Vector3<f64>, t: f64, k0: &Vector3<f64>) -> Vector3<f64> {
    x - (nu + k0) * t
}

/// `ζ(x, t)` for a point on an analytic cap or a smooth-backed mesh; plain
/// meshes must pass a vertex position.
pub fn zeta(surface: &CapillarySurface, x: &Vector3<f64>, t: f64, k0: &CapillaryVector) -> Result<Vector3<f64>, FoliationError> {
    let (nu, kmax) = match surface.kind() {
        SurfaceKind::Analytic(cap) => {
            let c = curvature_sphere(&cap.center, cap.radius, x)?;
            (c.normal, c.kappa_max())
        }
        SurfaceKind::Mesh(ms) => match ms.backing() {
            Some(b) => {
                let u = b.smooth.direction_of(x);
                let off = (b.smooth.point(&u) - x).norm();
                if off > crate::curvature::ON_SURFACE_TOL * surface.diameter().max(1.0) {
                    return Err(FoliationError::OffSurface(off));
                }
                let c = b.smooth.curvature(&u);
                (c.normal, c.kappa_max())
            }
            None => {
                let mesh = ms.mesh();
                let (v, d) = (0..mesh.vertex_count())
                    .map(|v| (v, (mesh.vertex(v).coords - x).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("nonempty mesh");
                if d > crate::curvature::ON_SURFACE_TOL * surface.diameter().max(1.0) {
                    return Err(FoliationError::OffSurface(d));
                }
                let c = &ms.curvature()?[v];
                (c.normal, c.kappa_max())
            }
        },
    };
    let t_max = time_bound(kmax);
    if t > t_max + 1e-12 {
        return Err(FoliationError::OutOfDomain { t, t_max });
    }
    Ok(zeta_at(x, &nu, t, &k0.vec3()))
}

/// `(1 + <ν, k0>) ∏(1 − t κ_i)`.
pub fn zeta_jacobian(kappas: &[f64], nu: &Vector3<f64>, k0: &Vector3<f64>, t: f64) -> f64 {
    (1.0 + nu.dot(k0)) * kappas.iter().map(|k| 1.0 - t * k).product::<f64>()
}

/// `((1/n) Σ(1 − t κ_i))^n − ∏(1 − t κ_i)`, nonnegative whenever every
/// factor is.
pub fn am_gm_gap(kappas: &[f64], t: f64) -> f64 {
    let n = kappas.len() as f64;
    let mean = kappas.iter().map(|k| 1.0 - t * k).sum::<f64>() / n;
    mean.powi(kappas.len() as i32) - kappas.iter().map(|k| 1.0 - t * k).product::<f64>()
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct VolumeChain {
    pub volume: f64,
    /// `∫_Z J ζ`.
    pub jacobian_integral: f64,
    /// `∫_Σ (1 + <ν,k0>) ∫_0^{1/κ_1} (1 − tH/n)^n dt dA`.
    pub am_gm_integral: f64,
    /// `(n/(n+1)) ∫_Σ (1 + <ν,k0>)/H dA`.
    pub hk_bound: f64,
    /// The four quantities are nondecreasing up to `tol`.
    pub ordered: bool,
}

/// Per-point time integrals for `n = 2`: `∫_0^T ∏(1 − tκ_i) dt` with
/// `T = 1/κ_1`, its AM-GM majorant over the same range, and the majorant
/// over `[0, 2/H]`.
fn time_integrals(k: &[f64]) -> (f64, f64, f64) {
    let (k1, k2) = (k[0], k[1]);
    let h = k1 + k2;
    let t = 1.0 / k1;
    let jac = t - h * t * t / 2.0 + k1 * k2 * t * t * t / 3.0;
    // ∫_0^T (1 − tH/2)^2 dt
    let amgm = (2.0 / (3.0 * h)) * (1.0 - (1.0 - t * h / 2.0).powi(3));
    (jac, amgm, 2.0 / (3.0 * h))
}

/// Evaluates the volume chain on a strictly mean convex surface with
/// positive largest principal curvature everywhere.
pub fn volume_chain(surface: &CapillarySurface, k0: &CapillaryVector, tol: f64) -> Result<VolumeChain, FoliationError> {
    let k = k0.vec3();
    let volume = enclosed_volume(surface)?;
    let (jacobian_integral, am_gm_integral, hk_bound) = match surface.kind() {
        SurfaceKind::Analytic(cap) => {
            let kap = 1.0 / cap.radius;
            let (j, a, b) = time_integrals(&[kap, kap]);
            let w = cap.area() + cap.flux().dot(&k);
            (w * j, w * a, w * b)
        }
        SurfaceKind::Mesh(ms) => {
            let mesh = ms.mesh();
            let curv = ms.curvature()?;
            let mut parts = [Vec::new(), Vec::new(), Vec::new()];
            for (v, c) in curv.iter().enumerate() {
                if !(c.kappa_max() > 0.0 && c.mean > 0.0) {
                    return Err(IntegralError::NotMeanConvex { vertex: v, mean: c.mean }.into());
                }
                let w = 1.0 + c.normal.dot(&k);
                let (j, a, b) = time_integrals(&c.kappas);
                parts[0].push(w * j);
                parts[1].push(w * a);
                parts[2].push(w * b);
            }
            (
                integrate_vertex_field(mesh, &parts[0]),
                integrate_vertex_field(mesh, &parts[1]),
                integrate_vertex_field(mesh, &parts[2]),
            )
        }
    };
    let ordered = volume <= jacobian_integral + tol && jacobian_integral <= am_gm_integral + tol && am_gm_integral <= hk_bound + tol;
    Ok(VolumeChain { volume, jacobian_integral, am_gm_integral, hk_bound, ordered })
}
