//! Supporting regions: half-spaces and (generalized) wedges.
//!
//! A wedge is the closed region `{x : <x, N_i> <= 0 for all i}` cut out by
//! hyperplanes through the origin with outward unit normals `N_i`. The
//! capillary vector `k0` is the unique combination `sum c_i N_i` with
//! `<k0, N_i> = cos theta_i`; everything downstream (parallel map, foliation,
//! deficit integrand) is phrased in terms of it.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unit-norm tolerance for wedge normals.
pub const NORMAL_TOL: f64 = 1e-12;
/// Open-interval containment tolerance for contact angles.
pub const ANGLE_TOL: f64 = 1e-12;
/// Largest Gram condition number accepted by [`solve_k0`].
pub const MAX_GRAM_CONDITION: f64 = 1e12;
/// Width of the admissibility boundary band (`|k0| = 1`).
pub const ADMISSIBLE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WedgeError {
    #[error("wedge needs at least one plane")]
    NoPlanes,
    #[error("ambient dimension {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("normal {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("normal {0} has zero length")]
    ZeroNormal(usize),
    #[error("{planes} planes do not fit in R^{dim}")]
    TooManyPlanes { planes: usize, dim: usize },
    #[error("wedge normals are linearly dependent (Gram condition number {0:e})")]
    DependentNormals(f64),
    #[error("Gram matrix is numerically singular (condition number {0:e})")]
    SingularGram(f64),
    #[error("got {angles} contact angles for {planes} planes")]
    ArityMismatch { planes: usize, angles: usize },
    #[error("contact angle {0} is outside (0, pi)")]
    AngleOutOfRange(f64),
    #[error("degenerate wedge: sin(alpha) = {0:e}")]
    DegenerateWedge(f64),
    #[error("operation needs exactly two planes, wedge has {0}")]
    WrongArity(usize),
    #[error("operation needs ambient dimension 3, wedge lives in R^{0}")]
    NotThreeDimensional(usize),
    #[error("config error: {0}")]
    Config(String),
}

/// Closed region bounded by hyperplanes through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Wedge {
    normals: Vec<DVector<f64>>,
}

impl Wedge {
    /// Builds a wedge from raw outward normals. Normals are normalized; they
    /// must be linearly independent and share the ambient dimension.
    pub fn new(normals: Vec<Vec<f64>>) -> Result<Self, WedgeError> {
        let first = normals.first().ok_or(WedgeError::NoPlanes)?;
        let dim = first.len();
        if dim < 3 {
            return Err(WedgeError::DimensionTooSmall(dim));
        }
        if normals.len() > dim {
            return Err(WedgeError::TooManyPlanes { planes: normals.len(), dim });
        }
        let mut unit = Vec::with_capacity(normals.len());
        for (index, n) in normals.iter().enumerate() {
            if n.len() != dim {
                return Err(WedgeError::DimensionMismatch { index, expected: dim, found: n.len() });
            }
            let v = DVector::from_column_slice(n);
            let norm = v.norm();
            if norm < 1e-300 || !norm.is_finite() {
                return Err(WedgeError::ZeroNormal(index));
            }
            unit.push(v / norm);
        }
        let wedge = Wedge { normals: unit };
        let cond = condition_number(&wedge.gram());
        if cond > MAX_GRAM_CONDITION {
            return Err(WedgeError::DependentNormals(cond));
        }
        Ok(wedge)
    }

    /// The upper half-space `x_{n+1} >= 0` in `R^dim`, i.e. `N = -E_{n+1}`.
    pub fn half_space(dim: usize) -> Result<Self, WedgeError> {
        let mut n = vec![0.0; dim];
        if let Some(last) = n.last_mut() {
            *last = -1.0;
        }
        Wedge::new(vec![n])
    }

    /// Classical wedge in `R^3` with opening angle `alpha`.
    ///
    /// `P_1 = {z = 0}` with `N_1 = -E_3`; `P_2` contains the x-axis and
    /// `N_2 = (0, -sin alpha, cos alpha)`, so `<N_1, N_2> = -cos alpha`.
    pub fn classical(alpha: f64) -> Result<Self, WedgeError> {
        if !(alpha > 0.0 && alpha < PI) || alpha.sin() < 1e-12 {
            return Err(WedgeError::DegenerateWedge(alpha.sin()));
        }
        Wedge::new(vec![vec![0.0, 0.0, -1.0], vec![0.0, -alpha.sin(), alpha.cos()]])
    }

    pub fn ambient_dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn plane_count(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[DVector<f64>] {
        &self.normals
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let l = self.normals.len();
        DMatrix::from_fn(l, l, |i, j| self.normals[i].dot(&self.normals[j]))
    }

    /// Normals as 3-vectors; fails outside `R^3`.
    pub fn normals3(&self) -> Result<Vec<Vector3<f64>>, WedgeError> {
        if self.ambient_dim() != 3 {
            return Err(WedgeError::NotThreeDimensional(self.ambient_dim()));
        }
        Ok(self.normals.iter().map(|n| Vector3::new(n[0], n[1], n[2])).collect())
    }

    /// `<x, N_i>`: negative inside the half-space bounded by `P_i`.
    pub fn plane_value(&self, i: usize, x: &[f64]) -> f64 {
        self.normals[i].iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        (0..self.plane_count()).all(|i| self.plane_value(i, x) <= tol)
    }

    /// Unit direction of the edge `P_1 ∩ P_2` for a classical wedge in `R^3`.
    pub fn edge_direction(&self) -> Result<Vector3<f64>, WedgeError> {
        if self.plane_count() != 2 {
            return Err(WedgeError::WrongArity(self.plane_count()));
        }
        let n = self.normals3()?;
        Ok(n[0].cross(&n[1]).normalize())
    }
}

/// Prescribed contact angles, one per wedge plane, each in `(0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ContactAngles(Vec<f64>);

impl ContactAngles {
    pub fn new(thetas: Vec<f64>) -> Result<Self, WedgeError> {
        for &t in &thetas {
            if !(t > ANGLE_TOL && t < PI - ANGLE_TOL) || !t.is_finite() {
                return Err(WedgeError::AngleOutOfRange(t));
            }
        }
        Ok(ContactAngles(thetas))
    }

    pub fn uniform(theta: f64, count: usize) -> Result<Self, WedgeError> {
        ContactAngles::new(vec![theta; count])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ContactAngles {
    type Error = WedgeError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        ContactAngles::new(v)
    }
}

impl From<ContactAngles> for Vec<f64> {
    fn from(a: ContactAngles) -> Self {
        a.0
    }
}

/// `k0 = sum c_i N_i` with `<k0, N_i> = cos theta_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapillaryVector {
    pub k0: DVector<f64>,
    pub coefficients: Vec<f64>,
}

impl CapillaryVector {
    /// Wraps an arbitrary vector, e.g. for negative controls with `|k0| > 1`.
    pub fn from_vector(k0: DVector<f64>) -> Self {
        CapillaryVector { k0, coefficients: Vec::new() }
    }

    pub fn from_vec3(k0: Vector3<f64>) -> Self {
        CapillaryVector::from_vector(DVector::from_column_slice(k0.as_slice()))
    }

    pub fn norm(&self) -> f64 {
        self.k0.norm()
    }

    /// First three components; callers work in `R^3`.
    pub fn vec3(&self) -> Vector3<f64> {
        Vector3::new(self.k0[0], self.k0[1], self.k0[2])
    }
}

/// Minimum-norm solution of `<k0, N_i> = cos theta_i`, which lies in the
/// span of the normals. Solved through a thin QR factorization of the
/// normal matrix rather than the Gram system, so the error grows with
/// `cond(N)` instead of `cond(N)^2` on thin wedges.
pub fn solve_k0(wedge: &Wedge, angles: &ContactAngles) -> Result<CapillaryVector, WedgeError> {
    let l = wedge.plane_count();
    if angles.len() != l {
        return Err(WedgeError::ArityMismatch { planes: l, angles: angles.len() });
    }
    let cond = condition_number(&wedge.gram());
    if cond > MAX_GRAM_CONDITION {
        return Err(WedgeError::SingularGram(cond));
    }
    if l == 1 {
        // exact for a single plane: k0 = cos(theta) N
        let n = &wedge.normals()[0];
        let c = angles.as_slice()[0].cos() / n.norm_squared();
        return Ok(CapillaryVector { k0: n * c, coefficients: vec![c] });
    }
    let n = DMatrix::from_columns(wedge.normals());
    let rhs = DVector::from_iterator(l, angles.as_slice().iter().map(|t| t.cos()));
    let qr = n.qr();
    let r = qr.r();
    // R^T y = b, k0 = Q y, and R c = y for the coefficients
    let y = r.transpose().solve_lower_triangular(&rhs).ok_or(WedgeError::SingularGram(f64::INFINITY))?;
    let c = r.solve_upper_triangular(&y).ok_or(WedgeError::SingularGram(f64::INFINITY))?;
    let k0 = qr.q() * y;
    Ok(CapillaryVector { k0, coefficients: c.iter().copied().collect() })
}

/// `|k0|^2 = (cos²θ1 + cos²θ2 + 2 cosθ1 cosθ2 cosα) / sin²α` for a classical
/// wedge, evaluated as `(c1+c2)²/(4 sin²(α/2)) + (c1−c2)²/(4 cos²(α/2))`,
/// a sum of nonnegative terms free of cancellation.
pub fn k0_norm_closed_form(theta1: f64, theta2: f64, alpha: f64) -> Result<f64, WedgeError> {
    for t in [theta1, theta2] {
        if !(t > 0.0 && t < PI) {
            return Err(WedgeError::AngleOutOfRange(t));
        }
    }
    let s = alpha.sin();
    if !(alpha > 0.0 && alpha < PI) || s < 1e-12 {
        return Err(WedgeError::DegenerateWedge(s));
    }
    let (c1, c2) = (theta1.cos(), theta2.cos());
    let (sh, ch) = (0.5 * alpha).sin_cos();
    Ok((c1 + c2).powi(2) / (4.0 * sh * sh) + (c1 - c2).powi(2) / (4.0 * ch * ch))
}

/// The angle chain `|pi - (θ1+θ2)| <= α <= pi - |θ1-θ2|`.
///
/// The non-strict variant accepts the boundary band of width
/// [`ADMISSIBLE_TOL`]; the strict variant requires clearing it.
pub fn admissible(theta1: f64, theta2: f64, alpha: f64, strict: bool) -> bool {
    let lower = (PI - (theta1 + theta2)).abs();
    let upper = PI - (theta1 - theta2).abs();
    if strict {
        lower < alpha - ADMISSIBLE_TOL && alpha < upper - ADMISSIBLE_TOL
    } else {
        lower <= alpha + ADMISSIBLE_TOL && alpha <= upper + ADMISSIBLE_TOL
    }
}

/// Opening angle from `<N_1, N_2> = -cos α`.
pub fn dihedral_angle(wedge: &Wedge) -> Result<f64, WedgeError> {
    if wedge.plane_count() != 2 {
        return Err(WedgeError::WrongArity(wedge.plane_count()));
    }
    let c = -wedge.normals[0].dot(&wedge.normals[1]);
    Ok(c.clamp(-1.0, 1.0).acos())
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Wedge/angle configuration block: `{"normals": [[...]], "thetas": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WedgeConfig {
    pub normals: Vec<Vec<f64>>,
    pub thetas: Vec<f64>,
}

impl WedgeConfig {
    pub fn build(&self) -> Result<(Wedge, ContactAngles), WedgeError> {
        let wedge = Wedge::new(self.normals.clone())?;
        let angles = ContactAngles::new(self.thetas.clone())?;
        if angles.len() != wedge.plane_count() {
            return Err(WedgeError::ArityMismatch { planes: wedge.plane_count(), angles: angles.len() });
        }
        Ok((wedge, angles))
    }

    pub fn from_json(s: &str) -> Result<Self, WedgeError> {
        serde_json::from_str(s).map_err(|e| WedgeError::Config(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self, WedgeError> {
        toml::from_str(s).map_err(|e| WedgeError::Config(e.to_string()))
    }

    /// Dispatches on the file extension (`.toml`, anything else is JSON).
    pub fn load(path: &Path) -> Result<Self, WedgeError> {
        let text = std::fs::read_to_string(path).map_err(|e| WedgeError::Config(e.to_string()))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => WedgeConfig::from_toml(&text),
            _ => WedgeConfig::from_json(&text),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn single_plane_k0_is_cos_theta_times_normal() {
        let w = Wedge::half_space(3).unwrap();
        let a = ContactAngles::new(vec![FRAC_PI_3]).unwrap();
        let k = solve_k0(&w, &a).unwrap();
        assert_relative_eq!(k.k0[2], -0.5, epsilon = 1e-15);
        assert_eq!(k.k0[0], 0.0);
        assert_eq!(k.coefficients.len(), 1);
        assert_relative_eq!(k.coefficients[0], FRAC_PI_3.cos(), epsilon = 1e-15);
    }

    #[test]
    fn right_angles_give_zero_k0() {
        for alpha in [0.3, FRAC_PI_2, 2.5] {
            let w = Wedge::classical(alpha).unwrap();
            let a = ContactAngles::uniform(FRAC_PI_2, 2).unwrap();
            let k = solve_k0(&w, &a).unwrap();
            assert!(k.norm() < 1e-15);
        }
    }

    #[test]
    fn boundary_case_has_unit_k0() {
        let t = 3.0 * FRAC_PI_4;
        assert_relative_eq!(k0_norm_closed_form(t, t, FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-14);
        let w = Wedge::classical(FRAC_PI_2).unwrap();
        let k = solve_k0(&w, &ContactAngles::uniform(t, 2).unwrap()).unwrap();
        assert_relative_eq!(k.norm(), 1.0, epsilon = 1e-14);
        assert!(admissible(t, t, FRAC_PI_2, false));
        assert!(!admissible(t, t, FRAC_PI_2, true));
    }

    #[test]
    fn closed_form_zero_for_right_angles() {
        assert_eq!(k0_norm_closed_form(FRAC_PI_2, FRAC_PI_2, FRAC_PI_3).unwrap() < 1e-30, true);
        assert!(admissible(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, true));
    }

    #[test]
    fn angle_constraints_hold_after_solve() {
        let w = Wedge::classical(1.1).unwrap();
        let a = ContactAngles::new(vec![0.7, 2.2]).unwrap();
        let k = solve_k0(&w, &a).unwrap();
        for (n, t) in w.normals().iter().zip(a.as_slice()) {
            assert!((k.k0.dot(n) - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn dihedral_angle_cases() {
        let w = Wedge::new(vec![vec![0.0, 0.0, -1.0], vec![0.0, -1.0, 0.0]]).unwrap();
        assert_relative_eq!(dihedral_angle(&w).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        // <N1, N2> = -1/2
        let w = Wedge::new(vec![vec![1.0, 0.0, 0.0], vec![-0.5, 0.75f64.sqrt(), 0.0]]).unwrap();
        assert_relative_eq!(dihedral_angle(&w).unwrap(), FRAC_PI_3, epsilon = 1e-12);
        for alpha in [0.1, 1.0, FRAC_PI_2, 2.0, 3.0] {
            let w = Wedge::classical(alpha).unwrap();
            assert_relative_eq!(dihedral_angle(&w).unwrap(), alpha, epsilon = 1e-12);
        }
        assert_eq!(dihedral_angle(&Wedge::half_space(3).unwrap()), Err(WedgeError::WrongArity(1)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Wedge::new(vec![]), Err(WedgeError::NoPlanes)));
        assert!(matches!(
            Wedge::new(vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]),
            Err(WedgeError::DependentNormals(_))
        ));
        assert!(matches!(Wedge::new(vec![vec![0.0, 0.0, 0.0]]), Err(WedgeError::ZeroNormal(0))));
        assert!(ContactAngles::new(vec![0.0]).is_err());
        assert!(ContactAngles::new(vec![PI]).is_err());
        assert!(matches!(k0_norm_closed_form(1.0, 1.0, 0.0), Err(WedgeError::DegenerateWedge(_))));
        let w = Wedge::classical(1.0).unwrap();
        assert!(matches!(
            solve_k0(&w, &ContactAngles::new(vec![1.0]).unwrap()),
            Err(WedgeError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn normals_are_normalized_on_construction() {
        let w = Wedge::new(vec![vec![0.0, 0.0, -3.0]]).unwrap();
        assert_relative_eq!(w.normals()[0].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"normals": [[0, 0, -1], [0, -1, 0]], "thetas": [1.0, 2.0]}"#;
        let cfg = WedgeConfig::from_json(json).unwrap();
        let (w, a) = cfg.build().unwrap();
        assert_eq!(w.plane_count(), 2);
        assert_eq!(a.as_slice(), &[1.0, 2.0]);
        let toml_text = "normals = [[0.0, 0.0, -1.0]]\nthetas = [0.5]\n";
        let cfg = WedgeConfig::from_toml(toml_text).unwrap();
        assert_eq!(cfg.build().unwrap().0.plane_count(), 1);
        let bad = r#"{"normals": [[0, 0, -1]], "thetas": [1.0, 2.0]}"#;
        assert!(WedgeConfig::from_json(bad).unwrap().build().is_err());
    }
}
