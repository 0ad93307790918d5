//! Sweepout coverage: every interior point should be reached by the
//! parallel map at a first touch.

use nalgebra::Vector3;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::oracle::Oracle;
use super::touch::{interior_with, TouchClass};
use super::FoliationError;
use crate::surface::{CapillarySurface, SurfaceKind};
use crate::wedge::CapillaryVector;

/// Rejection-sampling attempts per requested sample before giving up.
const MAX_ATTEMPTS_PER_SAMPLE: usize = 10_000;
/// Residual `|y − ζ(x, r0)|` accepted as a hit, relative to the diameter.
pub const COVERAGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct ClassHistogram {
    pub interior: usize,
    pub face: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepReport {
    pub samples: usize,
    pub covered: usize,
    pub coverage: f64,
    pub classes: ClassHistogram,
    /// Face or edge touches with `η^i < θ^i(x)`.
    pub violations: usize,
    pub no_touch: usize,
    pub max_residual: f64,
    /// Largest `r0 − t_max(x)`.
    pub max_time_excess: f64,
    /// A few failure descriptions, in sample order.
    pub failures: Vec<String>,
}

/// `n` points uniformly distributed in `Ω`, by rejection in the surface's
/// bounding box with a deterministic generator.
pub fn sample_interior(surface: &CapillarySurface, n: usize, seed: u64) -> Result<Vec<Vector3<f64>>, FoliationError> {
    let oracle = Oracle::new(surface)?;
    sample_with(&oracle, surface, n, seed)
}

fn sample_with(oracle: &Oracle, surface: &CapillarySurface, n: usize, seed: u64) -> Result<Vec<Vector3<f64>>, FoliationError> {
    let normals = surface.wedge().normals3()?;
    let (lo, hi) = match surface.kind() {
        SurfaceKind::Analytic(cap) => cap.bounds(),
        SurfaceKind::Mesh(ms) => {
            let (a, b) = ms.mesh().bounds();
            (a.coords, b.coords)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS_PER_SAMPLE * n.max(1) {
            return Err(FoliationError::NoSeed("rejection sampling found no interior points".into()));
        }
        let p = Vector3::new(
            lo.x + (hi.x - lo.x) * rng.random::<f64>(),
            lo.y + (hi.y - lo.y) * rng.random::<f64>(),
            lo.z + (hi.z - lo.z) * rng.random::<f64>(),
        );
        if oracle.contains(&p, &normals) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Runs the interior first-touch search from `n_samples` random points of
/// `Ω` with the foliation vector `k0` (which need not be the surface's own).
pub fn sweepout_coverage(
    surface: &CapillarySurface,
    k0: &CapillaryVector,
    n_samples: usize,
    seed: u64,
) -> Result<SweepReport, FoliationError> {
    let oracle = Oracle::new(surface)?;
    let seeds = sample_with(&oracle, surface, n_samples, seed)?;
    let diam = surface.diameter();
    let results: Vec<_> = seeds.par_iter().map(|y| interior_with(&oracle, surface, y, k0)).collect();

    let mut rep = SweepReport {
        samples: n_samples,
        covered: 0,
        coverage: 0.0,
        classes: ClassHistogram::default(),
        violations: 0,
        no_touch: 0,
        max_residual: 0.0,
        max_time_excess: f64::NEG_INFINITY,
        failures: Vec::new(),
    };
    let fail = |rep: &mut SweepReport, msg: String| {
        if rep.failures.len() < 8 {
            rep.failures.push(msg);
        }
    };
    for (y, r) in seeds.iter().zip(results) {
        match r {
            Ok(ev) => {
                match ev.class {
                    TouchClass::Interior => rep.classes.interior += 1,
                    TouchClass::Face(_) => rep.classes.face += 1,
                    TouchClass::Edge => rep.classes.edge += 1,
                }
                if ev.violation {
                    rep.violations += 1;
                }
                rep.max_residual = rep.max_residual.max(ev.residual);
                rep.max_time_excess = rep.max_time_excess.max(ev.r0 - ev.t_max);
                let ok = ev.residual < COVERAGE_TOL * diam && ev.r0 <= ev.t_max + COVERAGE_TOL * diam && !ev.violation;
                if ok {
                    rep.covered += 1;
                } else {
                    fail(&mut rep, format!("seed {:?}: residual {:e}, r0 {:e}, t_max {:e}", y.as_slice(), ev.residual, ev.r0, ev.t_max));
                }
            }
            Err(FoliationError::NoTouch { .. }) => {
                rep.no_touch += 1;
                fail(&mut rep, format!("seed {:?}: no touch", y.as_slice()));
            }
            Err(e) => return Err(e),
        }
    }
    rep.coverage = if n_samples > 0 { rep.covered as f64 / n_samples as f64 } else { 1.0 };
    Ok(rep)
}
