//! Angle comparisons at a first touch on the edge `P_1 ∩ P_2`.
//!
//! With `l` the edge direction, the boundary curves of the touching ball and
//! of the surface on plane `i` have tangents whose components along `l` are
//! `(cos η_j + cos η_i cos α)/(sin η_i sin α)` and the same with `θ`. A first
//! touch from inside needs the ball's component to dominate on both planes.

use serde::Serialize;

use super::FoliationError;

/// Sines below this make the tangent components meaningless.
const MIN_SINE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct EdgePredicates {
    /// `<T_{∂B^1}, l>`.
    pub t_ball1: f64,
    /// `<T_{∂B^2}, l>`.
    pub t_ball2: f64,
    /// `<T_{∂Σ^1}, l>`.
    pub t_surface1: f64,
    /// `<T_{∂Σ^2}, l>`.
    pub t_surface2: f64,
    /// `t_ball1 >= t_surface1`.
    pub first_plane: bool,
    /// `t_ball2 >= t_surface2`.
    pub second_plane: bool,
    /// Polynomial form of the first comparison:
    /// `sin θ1 (cos η2 − cos(θ2 − θ1 + η1)) + (cos(θ2 − θ1) + cos α) sin(θ1 − η1)`,
    /// which equals `(t_ball1 − t_surface1) sin η1 sin θ1 sin α`.
    pub first_polynomial: f64,
    /// Polynomial form of the second comparison (indices swapped).
    pub second_polynomial: f64,
    /// `η_i > θ_i` for both planes and `cos(θ2 − θ1) + cos α > 0`.
    pub hypotheses: bool,
    /// Under the hypotheses, both comparisons cannot hold at once; `None`
    /// when the hypotheses fail.
    pub contradiction: Option<bool>,
}

fn tangent_component(a: f64, b: f64, alpha: f64) -> f64 {
    (b.cos() + a.cos() * alpha.cos()) / (a.sin() * alpha.sin())
}

fn polynomial(t1: f64, t2: f64, e1: f64, e2: f64, alpha: f64) -> f64 {
    t1.sin() * (e2.cos() - (t2 - t1 + e1).cos()) + ((t2 - t1).cos() + alpha.cos()) * (t1 - e1).sin()
}

pub fn edge_predicates(theta1: f64, theta2: f64, eta1: f64, eta2: f64, alpha: f64) -> Result<EdgePredicates, FoliationError> {
    for a in [theta1, theta2, eta1, eta2, alpha] {
        let s = a.sin();
        if !(s >= MIN_SINE) {
            return Err(FoliationError::DegenerateAngle(s));
        }
    }
    let t_ball1 = tangent_component(eta1, eta2, alpha);
    let t_ball2 = tangent_component(eta2, eta1, alpha);
    let t_surface1 = tangent_component(theta1, theta2, alpha);
    let t_surface2 = tangent_component(theta2, theta1, alpha);
    let first_plane = t_ball1 >= t_surface1;
    let second_plane = t_ball2 >= t_surface2;
    let hypotheses = eta1 > theta1 && eta2 > theta2 && (theta2 - theta1).cos() + alpha.cos() > 0.0;
    Ok(EdgePredicates {
        t_ball1,
        t_ball2,
        t_surface1,
        t_surface2,
        first_plane,
        second_plane,
        first_polynomial: polynomial(theta1, theta2, eta1, eta2, alpha),
        second_polynomial: polynomial(theta2, theta1, eta2, eta1, alpha),
        hypotheses,
        contradiction: hypotheses.then_some(!(first_plane && second_plane)),
    })
}
