//! The modified parallel map `ζ(x, t) = x − t(ν(x) + k0)`, its Jacobian and
//! time domain, and the sphere foliations `S_r(y + r k0)` used to sweep the
//! enclosed region and to locate elliptic points.
//!
//! All foliation numerics live in R³.

mod edge;
pub mod oracle;
mod parallel;
mod sweep;
mod touch;

pub use edge::{edge_predicates, EdgePredicates};
pub use parallel::{am_gm_gap, volume_chain, zeta, zeta_at, zeta_jacobian, ParallelDomain, VolumeChain};
pub use sweep::{sample_interior, sweepout_coverage, ClassHistogram, SweepReport};
pub use touch::{
    classify_touch, elliptic_point, elliptic_seed, first_touch_exterior, first_touch_interior, EllipticPoint, TouchClass,
    TouchEvent,
};

use thiserror::Error;

use crate::curvature::CurvatureError;
use crate::integrals::IntegralError;
use crate::surface::SurfaceError;
use crate::wedge::WedgeError;

/// Geometric grid of first-touch radii, relative to the diameter.
pub const GRID_MIN: f64 = 1e-6;
pub const GRID_MAX: f64 = 1e3;
pub const GRID_POINTS: usize = 240;
/// Final bracket width of first-touch radii, relative to the diameter.
pub const BRACKET_TOL: f64 = 1e-10;
/// Plane incidence tolerance for touch classification, relative to the
/// diameter.
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Slack below the surface contact angle before a face touch counts as a
/// violation.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FoliationError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Wedge(#[from] WedgeError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error("t = {t} exceeds the time bound {t_max}")]
    OutOfDomain { t: f64, t_max: f64 },
    #[error("point is {0:e} away from the surface")]
    OffSurface(f64),
    #[error("no touch up to r = {r_max:e}: spheres S_r(y + r k0) never meet the surface")]
    NoTouch { r_max: f64 },
    #[error("seed {0:?} is not strictly inside the enclosed region")]
    NotInside([f64; 3]),
    #[error("no sphere of the family encloses the surface up to r = {r_max:e}")]
    NoEnclosure { r_max: f64 },
    #[error("degenerate angle: sine {0:e} is below 1e-12")]
    DegenerateAngle(f64),
    #[error("no admissible foliation seed: {0}")]
    NoSeed(String),
}

/// Geometric grid `GRID_MIN..GRID_MAX` scaled by `diameter`.
pub(crate) fn radius_grid(diameter: f64) -> Vec<f64> {
    let (a, b) = (GRID_MIN.ln(), GRID_MAX.ln());
    (0..GRID_POINTS)
        .map(|i| diameter * (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}
