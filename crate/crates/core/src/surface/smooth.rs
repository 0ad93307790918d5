//! Smooth radial graphs over a capillary cap: `F(u) = c + (R + psi(u)) u` for
//! unit directions `u` whose base point `c + R u` lies in the wedge.
//!
//! `psi` vanishes to second order on the boundary, so boundary points and
//! tangent planes (hence contact angles) of the underlying cap are kept.

use nalgebra::{Matrix2, Vector3};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cap::SphericalCap;
use super::shapes::icosphere_raw;
use crate::curvature::{from_fundamental_forms, tangent_basis, CurvatureData};

/// Step of the central differences used for normal derivatives.
const FD_STEP: f64 = 1e-5;
/// Depth of the direction sample used to normalize the perturbation profile.
const NORMALIZATION_DEPTH: usize = 5;

/// Boundary-flat bump `amplitude * scale * prod_i q_i^2 * Re(z^m)`, with
/// `q_i = <c + R u, N_i> / R` and `z` the complex coordinate of `u` in a
/// frame around the cap axis rotated by a seed-dependent phase.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub mode: u32,
    pub seed: u64,
    /// Rotation of the harmonic about the cap axis.
    pub phase: f64,
    /// Normalization making the profile's maximum modulus 1 on the cap.
    pub scale: f64,
    /// `(b1, b2, axis)`: rotated tangent frame and cap axis.
    pub frame: [Vector3<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothCap {
    cap: SphericalCap,
    perturbation: Option<Perturbation>,
}

impl Perturbation {
    pub fn new(cap: &SphericalCap, amplitude: f64, mode: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let axis = (-cap.normals.iter().fold(Vector3::zeros(), |a, n| a + n)).normalize();
        let (a1, a2) = tangent_basis(&axis);
        let b1 = a1 * phase.cos() + a2 * phase.sin();
        let b2 = a2 * phase.cos() - a1 * phase.sin();
        let mut p = Perturbation { amplitude, mode, seed, phase, scale: 1.0, frame: [b1, b2, axis] };
        let (dirs, _) = icosphere_raw(NORMALIZATION_DEPTH);
        let max = dirs
            .iter()
            .filter(|u| in_domain(cap, u, 0.0))
            .map(|u| p.profile(cap, u).0.abs())
            .fold(0.0, f64::max);
        if max > 0.0 {
            p.scale = 1.0 / max;
        }
        p
    }

    /// Unscaled profile and its ambient gradient in `u`.
    fn profile(&self, cap: &SphericalCap, u: &Vector3<f64>) -> (f64, Vector3<f64>) {
        let k = cap.k0;
        let q: Vec<f64> = cap.normals.iter().map(|n| n.dot(&k) + n.dot(u)).collect();
        let mut w = 1.0;
        let mut dw = Vector3::zeros();
        for (i, n) in cap.normals.iter().enumerate() {
            let others: f64 = q.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x * x).product();
            dw += n * (2.0 * q[i] * others);
            w *= q[i] * q[i];
        }
        let (y, dy) = self.harmonic(u);
        (w * y, dw * y + dy * w)
    }

    fn harmonic(&self, u: &Vector3<f64>) -> (f64, Vector3<f64>) {
        let m = self.mode;
        if m == 0 {
            return (1.0, Vector3::zeros());
        }
        let [b1, b2, _] = &self.frame;
        let (x, y) = (u.dot(b1), u.dot(b2));
        // w = z^(m-1), z = x + i y
        let (mut wr, mut wi) = (1.0, 0.0);
        for _ in 0..m - 1 {
            (wr, wi) = (wr * x - wi * y, wr * y + wi * x);
        }
        let zr = wr * x - wi * y;
        (zr, (b1 * wr - b2 * wi) * m as f64)
    }
}

fn in_domain(cap: &SphericalCap, u: &Vector3<f64>, tol: f64) -> bool {
    cap.normals.iter().all(|n| n.dot(&cap.k0) + n.dot(u) <= tol)
}

impl SmoothCap {
    pub fn exact(cap: SphericalCap) -> Self {
        SmoothCap { cap, perturbation: None }
    }

    pub fn perturbed(cap: SphericalCap, perturbation: Perturbation) -> Self {
        SmoothCap { cap, perturbation: Some(perturbation) }
    }

    pub fn cap(&self) -> &SphericalCap {
        &self.cap
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        self.perturbation.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.perturbation.is_none()
    }

    pub fn scaled(&self, lambda: f64) -> SmoothCap {
        SmoothCap {
            cap: self.cap.scaled(lambda),
            perturbation: self.perturbation.clone().map(|mut p| {
                p.amplitude *= lambda;
                p
            }),
        }
    }

    /// Whether the base point of direction `u` lies in the wedge.
    pub fn in_domain(&self, u: &Vector3<f64>, tol: f64) -> bool {
        in_domain(&self.cap, u, tol)
    }

    /// Radial displacement and its ambient gradient.
    pub fn psi(&self, u: &Vector3<f64>) -> (f64, Vector3<f64>) {
        match &self.perturbation {
            None => (0.0, Vector3::zeros()),
            Some(p) => {
                let (v, g) = p.profile(&self.cap, u);
                let s = p.amplitude * p.scale;
                (v * s, g * s)
            }
        }
    }

    pub fn point(&self, u: &Vector3<f64>) -> Vector3<f64> {
        let (psi, _) = self.psi(u);
        self.cap.center + u * (self.cap.radius + psi)
    }

    /// Outward unit normal `∝ rho u - grad_S rho`.
    pub fn normal(&self, u: &Vector3<f64>) -> Vector3<f64> {
        if self.perturbation.is_none() {
            return *u;
        }
        let (psi, g) = self.psi(u);
        let gs = g - u * g.dot(u);
        (u * (self.cap.radius + psi) - gs).normalize()
    }

    /// Differential of `F` applied to a tangent vector `v` of the sphere at `u`.
    fn d_point(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        let (psi, g) = self.psi(u);
        v * (self.cap.radius + psi) + u * g.dot(v)
    }

    /// Curvature from the exact tangent map and central differences of the
    /// exact normal.
    pub fn curvature(&self, u: &Vector3<f64>) -> CurvatureData {
        let nu = self.normal(u);
        let (e1, e2) = tangent_basis(u);
        if self.perturbation.is_none() {
            let k = 1.0 / self.cap.radius;
            return CurvatureData::from_principal(nu, vec![k, k], vec![e1, e2]);
        }
        let x = [self.d_point(u, &e1), self.d_point(u, &e2)];
        let dn = [e1, e2].map(|e| {
            let up = (u + e * FD_STEP).normalize();
            let um = (u - e * FD_STEP).normalize();
            (self.normal(&up) - self.normal(&um)) / (2.0 * FD_STEP)
        });
        let first = Matrix2::new(x[0].dot(&x[0]), x[0].dot(&x[1]), x[1].dot(&x[0]), x[1].dot(&x[1]));
        let second = Matrix2::new(dn[0].dot(&x[0]), dn[0].dot(&x[1]), dn[1].dot(&x[0]), dn[1].dot(&x[1]));
        from_fundamental_forms(nu, x[0], x[1], first, second).unwrap_or_else(|| {
            CurvatureData::from_principal(nu, vec![f64::NAN, f64::NAN], vec![e1, e2])
        })
    }

    /// Direction `u` whose radial ray from the center passes through `p`.
    pub fn direction_of(&self, p: &Vector3<f64>) -> Vector3<f64> {
        (p - self.cap.center).normalize()
    }

    /// Strictly inside the enclosed region: in the open wedge and below the
    /// radial graph (outside the cap's directions the graph is the sphere).
    pub fn contains(&self, y: &Vector3<f64>) -> bool {
        if !self.cap.normals.iter().all(|n| n.dot(&(y - self.cap.base)) < 0.0) {
            return false;
        }
        let d = y - self.cap.center;
        let r = d.norm();
        if r == 0.0 {
            return true;
        }
        let u = d / r;
        let psi = if self.in_domain(&u, 0.0) { self.psi(&u).0 } else { 0.0 };
        r < self.cap.radius + psi
    }

    /// Nearest point to `p` on the surface. Exact for the unperturbed cap;
    /// otherwise Newton iteration on the squared distance starting from the
    /// direction `hint`. Returns the point and its direction, or `None` if
    /// the iteration leaves the cap's directions.
    pub fn closest_point(&self, p: &Vector3<f64>, hint: &Vector3<f64>) -> Option<(Vector3<f64>, Vector3<f64>)> {
        if self.perturbation.is_none() {
            let x = self.cap.closest_point(p);
            return Some((x, self.direction_of(&x)));
        }
        let mut u = hint.normalize();
        let grad = |u: &Vector3<f64>, e1: &Vector3<f64>, e2: &Vector3<f64>, a: f64, b: f64| {
            let w = u + e1 * a + e2 * b;
            let wn = w.norm();
            let uu = w / wn;
            let du = [e1, e2].map(|e| (e - uu * e.dot(&uu)) / wn);
            let r = self.point(&uu) - p;
            [r.dot(&self.d_point(&uu, &du[0])), r.dot(&self.d_point(&uu, &du[1]))]
        };
        let h = 1e-6;
        for _ in 0..50 {
            let (e1, e2) = tangent_basis(&u);
            let g = grad(&u, &e1, &e2, 0.0, 0.0);
            let gp = [grad(&u, &e1, &e2, h, 0.0), grad(&u, &e1, &e2, 0.0, h)];
            let gm = [grad(&u, &e1, &e2, -h, 0.0), grad(&u, &e1, &e2, 0.0, -h)];
            let mut hess = Matrix2::zeros();
            for l in 0..2 {
                for k in 0..2 {
                    hess[(k, l)] = (gp[l][k] - gm[l][k]) / (2.0 * h);
                }
            }
            let hess = (hess + hess.transpose()) * 0.5;
            let gv = nalgebra::Vector2::new(g[0], g[1]);
            let step = match hess.cholesky() {
                Some(ch) => ch.solve(&gv),
                None => gv / self.cap.radius.powi(2),
            };
            let step_len = step.norm();
            let step = if step_len > 0.2 { step * (0.2 / step_len) } else { step };
            u = (u - e1 * step[0] - e2 * step[1]).normalize();
            if step_len < 1e-15 {
                break;
            }
        }
        if !self.in_domain(&u, 1e-12) {
            return None;
        }
        Some((self.point(&u), u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::cap::generate_cap;
    use crate::wedge::{ContactAngles, Wedge};
    use std::f64::consts::PI;

    fn hemi() -> SphericalCap {
        let w = Wedge::half_space(3).unwrap();
        generate_cap(&w, &ContactAngles::new(vec![PI / 2.0]).unwrap(), 1.0, 3).unwrap().as_cap().unwrap().clone()
    }

    #[test]
    fn boundary_is_fixed_to_first_order() {
        let cap = hemi();
        let s = SmoothCap::perturbed(cap.clone(), Perturbation::new(&cap, 0.05, 2, 7));
        for k in 0..16 {
            let a = k as f64 * PI / 8.0;
            let u = Vector3::new(a.cos(), a.sin(), 0.0);
            assert!((s.point(&u) - u).norm() < 1e-15);
            assert!((s.normal(&u) - u).norm() < 1e-15);
        }
    }

    #[test]
    fn normalized_amplitude() {
        let cap = hemi();
        let p = Perturbation::new(&cap, 0.05, 2, 1);
        let s = SmoothCap::perturbed(cap, p);
        let (dirs, _) = icosphere_raw(4);
        let m = dirs.iter().filter(|u| u.z >= 0.0).map(|u| s.psi(u).0.abs()).fold(0.0, f64::max);
        assert!(m <= 0.05 + 1e-12 && m > 0.04, "{m}");
    }

    #[test]
    fn gradient_matches_differences() {
        let cap = hemi();
        let s = SmoothCap::perturbed(cap.clone(), Perturbation::new(&cap, 0.1, 3, 3));
        let u = Vector3::new(0.3, -0.2, 0.8).normalize();
        let (_, g) = s.psi(&u);
        for e in [Vector3::x(), Vector3::y(), Vector3::z()] {
            let h = 1e-6;
            let fd = (s.psi(&(u + e * h)).0 - s.psi(&(u - e * h)).0) / (2.0 * h);
            assert!((fd - g.dot(&e)).abs() < 1e-8);
        }
    }

    #[test]
    fn newton_foot_point_is_orthogonal() {
        let cap = hemi();
        let s = SmoothCap::perturbed(cap.clone(), Perturbation::new(&cap, 0.05, 2, 3));
        let p = Vector3::new(0.1, 0.2, 0.4);
        let (x, u) = s.closest_point(&p, &Vector3::new(0.2, 0.3, 0.9)).unwrap();
        let n = s.normal(&u);
        let r = (p - x).normalize();
        assert!((r.cross(&n)).norm() < 1e-9);
    }
}
