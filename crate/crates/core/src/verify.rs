//! Verification suites: a config describing a family of surfaces and the
//! checks to run, a deterministic report over a ladder of resolutions, and
//! the sphere-fit diagnostic for near-CMC meshes.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::curvature_field;
use crate::foliation::{elliptic_point, sweepout_coverage, EllipticPoint, SweepReport};
use crate::integrals::{
    area, hk_deficit_wedge, hk_refined_closed, minkowski_residual, structural_residual, ClosedReport, DeficitReport,
};
use crate::surface::frames::{angle_stats, boundary_frames, AngleStats};
use crate::surface::shapes::{ellipsoid, icosphere};
use crate::surface::{generate_cap, perturb, CapillarySurface, PerturbationParams, TriMesh};
use crate::wedge::{admissible, solve_k0, ContactAngles, Wedge, ADMISSIBLE_TOL};

pub const SCHEMA_VERSION: u32 = 1;
/// Coefficient of variation of `H` above which the sphere fit is not
/// meaningful.
pub const CMC_THRESHOLD: f64 = 0.05;
/// Cap generation resolution for the analytic reference (only the mesh
/// levels use the config's ladder).
const ANALYTIC_RESOLUTION: usize = 3;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),
    #[error("{context}: {source}")]
    Step {
        context: String,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn step<E: std::error::Error + Send + Sync + 'static>(context: impl Into<String>) -> impl FnOnce(E) -> VerifyError {
    let context = context.into();
    move |e| VerifyError::Step { context, source: Box::new(e) }
}

fn config_err(path: &str, message: impl Into<String>) -> VerifyError {
    VerifyError::Config { path: path.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Halfspace,
    Wedge,
    Closed,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|deficit| / |Ω|` on exact surfaces at the finest level.
    pub deficit: f64,
    /// Minkowski residuals relative to the area.
    pub minkowski: f64,
    /// Structural residual norm relative to the area.
    pub structural: f64,
    /// Largest contact-angle error in radians.
    pub angle: f64,
    /// Max radial deviation of the sphere fit relative to the fitted radius.
    pub sphere_fit: f64,
    /// Perturbed deficits must exceed this multiple of the exact one.
    pub rigidity_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { deficit: 1e-2, minkowski: 1e-2, structural: 1e-2, angle: 1e-2, sphere_fit: 1e-6, rigidity_factor: 3.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    pub scenario: Scenario,
    /// Half-space contact angle.
    #[serde(default)]
    pub theta0: Option<f64>,
    #[serde(default)]
    pub theta1: Option<f64>,
    #[serde(default)]
    pub theta2: Option<f64>,
    /// Wedge opening angle.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Closed scenario: ellipsoid semi-axes; a sphere of `radius` if absent.
    #[serde(default)]
    pub semi_axes: Option<[f64; 3]>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Icosphere subdivision depths, strictly increasing.
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub perturbation: Option<PerturbationParams>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Sweepout samples per surface; 0 disables the sweepout.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub elliptic: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_radius() -> f64 {
    1.0
}
fn default_levels() -> Vec<usize> {
    vec![4, 5, 6]
}
fn default_samples() -> usize {
    200
}
fn default_true() -> bool {
    true
}

impl VerificationConfig {
    /// A config with defaults for everything but the scenario.
    pub fn new(scenario: Scenario) -> Self {
        VerificationConfig {
            scenario,
            theta0: None,
            theta1: None,
            theta2: None,
            alpha: None,
            semi_axes: None,
            radius: default_radius(),
            levels: default_levels(),
            perturbation: None,
            tolerances: Tolerances::default(),
            samples: default_samples(),
            seed: 0,
            elliptic: true,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| config_err(&e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, VerifyError> {
        let value: toml::Value = toml::from_str(text).map_err(|e| config_err(".", e.to_string()))?;
        let json = serde_json::to_value(value).map_err(|e| config_err(".", e.to_string()))?;
        let cfg: Self =
            serde_path_to_error::deserialize(json).map_err(|e| config_err(&e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads `.toml` files as TOML and anything else as JSON.
    pub fn load(path: &Path) -> Result<Self, VerifyError> {
        let text = std::fs::read_to_string(path).map_err(|source| VerifyError::Io { path: path.to_path_buf(), source })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_json(&text),
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(config_err("radius", format!("must be positive, got {}", self.radius)));
        }
        if self.levels.is_empty() {
            return Err(config_err("levels", "at least one level is required"));
        }
        for (i, w) in self.levels.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(config_err(&format!("levels[{}]", i + 1), format!("levels must be strictly increasing ({} after {})", w[1], w[0])));
            }
        }
        if self.levels[0] < crate::surface::cap::MIN_RESOLUTION {
            return Err(config_err("levels[0]", format!("must be at least {}", crate::surface::cap::MIN_RESOLUTION)));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("deficit", t.deficit),
            ("minkowski", t.minkowski),
            ("structural", t.structural),
            ("angle", t.angle),
            ("sphere_fit", t.sphere_fit),
            ("rigidity_factor", t.rigidity_factor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(&format!("tolerances.{name}"), format!("must be positive, got {v}")));
            }
        }
        let angle = |name: &str, v: Option<f64>| -> Result<f64, VerifyError> {
            let v = v.ok_or_else(|| config_err(name, format!("required for scenario {:?}", self.scenario).to_lowercase()))?;
            if !(v > 0.0 && v < PI) {
                return Err(config_err(name, format!("must lie in (0, pi), got {v}")));
            }
            Ok(v)
        };
        match self.scenario {
            Scenario::Halfspace => {
                angle("theta0", self.theta0)?;
            }
            Scenario::Wedge => {
                angle("theta1", self.theta1)?;
                angle("theta2", self.theta2)?;
                angle("alpha", self.alpha)?;
            }
            Scenario::Closed => {
                if let Some(ax) = self.semi_axes {
                    if ax.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                        return Err(config_err("semi_axes", "semi-axes must be positive"));
                    }
                }
                if self.perturbation.is_some() {
                    return Err(config_err("perturbation", "not supported for closed surfaces"));
                }
            }
        }
        if let Some(p) = &self.perturbation {
            if !(p.amplitude > 0.0 && p.amplitude.is_finite()) {
                return Err(config_err("perturbation.amplitude", format!("must be positive, got {}", p.amplitude)));
            }
        }
        Ok(())
    }

    /// Wedge and contact angles for the capillary scenarios.
    pub fn wedge(&self) -> Result<(Wedge, ContactAngles), VerifyError> {
        let build = |r: Result<(Wedge, ContactAngles), crate::wedge::WedgeError>| r.map_err(step("building the wedge"));
        match self.scenario {
            Scenario::Halfspace => {
                let t = self.theta0.ok_or_else(|| config_err("theta0", "required for scenario halfspace"))?;
                build(Wedge::half_space(3).and_then(|w| Ok((w, ContactAngles::new(vec![t])?))))
            }
            Scenario::Wedge => {
                let (t1, t2, a) = match (self.theta1, self.theta2, self.alpha) {
                    (Some(t1), Some(t2), Some(a)) => (t1, t2, a),
                    _ => return Err(config_err("theta1", "theta1, theta2 and alpha are required for scenario wedge")),
                };
                if !admissible(t1, t2, a, false) {
                    return Err(VerifyError::Inadmissible(format!(
                        "|k0| > 1: the angle chain |pi - (theta1 + theta2)| <= alpha <= pi - |theta1 - theta2| fails: {:.6} <= {:.6} <= {:.6}",
                        (PI - (t1 + t2)).abs(),
                        a,
                        PI - (t1 - t2).abs()
                    )));
                }
                build(Wedge::classical(a).and_then(|w| Ok((w, ContactAngles::new(vec![t1, t2])?))))
            }
            Scenario::Closed => Err(config_err("scenario", "closed surfaces have no wedge")),
        }
    }
}

/// One check with its measured value and threshold.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, passed: value < tolerance }
    }
    fn above(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, passed: value > tolerance }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EllipticSummary {
    pub r0: f64,
    pub point: Vector3<f64>,
    pub kappas: Vec<f64>,
    pub min_kappa_r0: f64,
    pub h: f64,
    pub passes: bool,
}

impl From<&EllipticPoint> for EllipticSummary {
    fn from(e: &EllipticPoint) -> Self {
        EllipticSummary { r0: e.event.r0, point: e.event.x, kappas: e.kappas.clone(), min_kappa_r0: e.min_kappa_r0, h: e.h, passes: e.passes }
    }
}

/// Results for one surface at one resolution.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub vertices: usize,
    pub faces: usize,
    pub mean_edge: f64,
    pub area: f64,
    pub deficit: DeficitReport,
    /// Minkowski residuals for `r = 1, 2`, relative to the area.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub minkowski: Vec<f64>,
    /// Structural residual norm relative to the area.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<AngleStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweepout: Option<SweepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elliptic: Option<EllipticSummary>,
}

/// Closed-form values on the analytic surface.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AnalyticSummary {
    pub deficit: DeficitReport,
    pub minkowski: Vec<f64>,
    pub structural: f64,
}

/// Observed orders `log2(e_{k-1}/e_k)` between the last two levels (each
/// level halves the mesh size).
#[derive(Debug, Clone, Serialize, PartialEq, Default)]
pub struct Rates {
    pub deficit: Option<f64>,
    pub minkowski: Vec<Option<f64>>,
    pub structural: Option<f64>,
    pub angle: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RigidityReport {
    pub params: PerturbationParams,
    pub levels: Vec<LevelReport>,
    /// Perturbed over exact deficit at each level.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: VerificationConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<Vector3<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticSummary>,
    pub levels: Vec<LevelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbed: Option<RigidityReport>,
    pub rates: Rates,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> Result<(), VerifyError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|source| VerifyError::Io { path: path.to_path_buf(), source })
    }
}

fn rate(prev: f64, last: f64) -> Option<f64> {
    let (a, b) = (prev.abs(), last.abs());
    (a > 0.0 && b > 0.0).then(|| (a / b).log2())
}

fn measure(surface: &CapillarySurface, level: usize, config: &VerificationConfig) -> Result<LevelReport, VerifyError> {
    let ctx = |what: &str| format!("level {level}: {what}");
    let ms = surface.as_mesh().expect("mesh surface");
    let stats = ms.mesh().stats();
    let a = area(surface);
    let k0 = surface.k0();
    let deficit = hk_deficit_wedge(surface, k0).map_err(step(ctx("HK deficit")))?;
    let minkowski = (1..=2)
        .map(|r| minkowski_residual(surface, k0, r).map(|m| m.abs() / a))
        .collect::<Result<Vec<_>, _>>()
        .map_err(step(ctx("Minkowski residual")))?;
    let structural = structural_residual(surface).map_err(step(ctx("structural residual")))?.norm() / a;
    let frames = boundary_frames(surface).map_err(step(ctx("boundary frames")))?;
    let angles = angle_stats(&frames, surface.target_angles().as_slice());
    let sweepout = if config.samples > 0 {
        Some(sweepout_coverage(surface, k0, config.samples, config.seed).map_err(step(ctx("sweepout")))?)
    } else {
        None
    };
    let elliptic = if config.elliptic {
        Some(EllipticSummary::from(&elliptic_point(surface, k0).map_err(step(ctx("elliptic point")))?))
    } else {
        None
    };
    Ok(LevelReport {
        level,
        vertices: stats.vertices,
        faces: stats.faces,
        mean_edge: stats.mean_edge,
        area: a,
        deficit,
        minkowski,
        structural: Some(structural),
        angles: Some(angles),
        sweepout,
        elliptic,
    })
}

fn surface_checks(prefix: &str, rep: &LevelReport, tol: &Tolerances, exact: bool, checks: &mut Vec<Check>) {
    if exact {
        checks.push(Check::below(&format!("{prefix}relative_deficit"), rep.deficit.relative_deficit.abs(), tol.deficit));
        for (i, m) in rep.minkowski.iter().enumerate() {
            checks.push(Check::below(&format!("{prefix}minkowski_r{}", i + 1), *m, tol.minkowski));
        }
        if let Some(s) = rep.structural {
            checks.push(Check::below(&format!("{prefix}structural"), s, tol.structural));
        }
        if let Some(a) = &rep.angles {
            checks.push(Check::below(&format!("{prefix}contact_angle"), a.max_error, tol.angle));
        }
    }
    if let Some(s) = &rep.sweepout {
        let missed = (s.samples - s.covered) as f64;
        checks.push(Check { name: format!("{prefix}sweepout_missed"), value: missed, tolerance: 0.0, passed: missed == 0.0 });
        checks.push(Check {
            name: format!("{prefix}sweepout_violations"),
            value: s.violations as f64,
            tolerance: 0.0,
            passed: s.violations == 0,
        });
    }
    if let Some(e) = &rep.elliptic {
        checks.push(Check { name: format!("{prefix}elliptic_point"), value: e.min_kappa_r0, tolerance: 1.0, passed: e.passes });
    }
}

fn closed_mesh(config: &VerificationConfig, level: usize) -> Result<TriMesh, VerifyError> {
    match config.semi_axes {
        Some(ax) => ellipsoid(level, ax),
        None => icosphere(level, Vector3::zeros(), config.radius),
    }
    .map_err(step(format!("level {level}: closed mesh")))
}

fn closed_level(config: &VerificationConfig, level: usize) -> Result<(LevelReport, ClosedReport), VerifyError> {
    let mesh = closed_mesh(config, level)?;
    let rep = hk_refined_closed(&mesh).map_err(step(format!("level {level}: refined HK")))?;
    let stats = mesh.stats();
    Ok((
        LevelReport {
            level,
            vertices: stats.vertices,
            faces: stats.faces,
            mean_edge: stats.mean_edge,
            area: crate::integrals::mesh_area(&mesh),
            deficit: rep.report.clone(),
            minkowski: Vec::new(),
            structural: None,
            angles: None,
            sweepout: None,
            elliptic: None,
        },
        rep,
    ))
}

/// Runs every check of the configured scenario over its resolution ladder.
/// Deterministic given the config.
pub fn run_suite(config: &VerificationConfig) -> Result<VerificationReport, VerifyError> {
    config.validate()?;
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    let mut rates = Rates::default();

    if config.scenario == Scenario::Closed {
        let mut levels = Vec::new();
        for &l in &config.levels {
            levels.push(closed_level(config, l)?.0);
        }
        let finest = levels.last().expect("nonempty levels");
        let sphere = config.semi_axes.is_none_or(|a| a[0] == a[1] && a[1] == a[2]);
        if sphere {
            checks.push(Check::below("relative_deficit", finest.deficit.relative_deficit.abs(), tol.deficit));
        } else {
            // strict inequality away from the equality case
            checks.push(Check::above("relative_deficit", finest.deficit.relative_deficit, tol.rigidity_factor * tol.deficit));
        }
        if let [.., a, b] = levels.as_slice() {
            rates.deficit = rate(a.deficit.relative_deficit, b.deficit.relative_deficit);
        }
        let pass = checks.iter().all(|c| c.passed);
        return Ok(VerificationReport {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            k0: None,
            analytic: None,
            levels,
            perturbed: None,
            rates,
            checks,
            pass,
        });
    }

    let (wedge, angles) = config.wedge()?;
    let k0 = solve_k0(&wedge, &angles).map_err(step("solving for k0"))?;
    if k0.norm() > 1.0 + ADMISSIBLE_TOL {
        return Err(VerifyError::Inadmissible(format!("|k0| = {} exceeds 1", k0.norm())));
    }
    let exact = generate_cap(&wedge, &angles, config.radius, ANALYTIC_RESOLUTION).map_err(step("generating the cap"))?;

    let ak = exact.k0();
    let analytic = AnalyticSummary {
        deficit: hk_deficit_wedge(&exact, ak).map_err(step("analytic HK deficit"))?,
        minkowski: (1..=2)
            .map(|r| minkowski_residual(&exact, ak, r))
            .collect::<Result<_, _>>()
            .map_err(step("analytic Minkowski residual"))?,
        structural: structural_residual(&exact).map_err(step("analytic structural residual"))?.norm(),
    };

    let mut levels = Vec::new();
    let mut perturbed = Vec::new();
    for &l in &config.levels {
        let mesh = exact.to_mesh_at(l).map_err(step(format!("level {l}: meshing the cap")))?;
        levels.push(measure(&mesh, l, config)?);
        if let Some(p) = &config.perturbation {
            let pm = perturb(&mesh, p.amplitude, p.mode, p.seed).map_err(step(format!("level {l}: perturbing")))?;
            perturbed.push(measure(&pm, l, config)?);
        }
    }

    let finest = levels.last().expect("nonempty levels");
    surface_checks("", finest, tol, true, &mut checks);
    if let [.., a, b] = levels.as_slice() {
        checks.push(Check::below("deficit_decreasing", b.deficit.relative_deficit.abs(), a.deficit.relative_deficit.abs()));
        rates.deficit = rate(a.deficit.relative_deficit, b.deficit.relative_deficit);
        rates.minkowski = a.minkowski.iter().zip(&b.minkowski).map(|(x, y)| rate(*x, *y)).collect();
        rates.structural = rate(a.structural.unwrap_or(0.0), b.structural.unwrap_or(0.0));
        rates.angle = rate(
            a.angles.map_or(0.0, |s| s.max_error),
            b.angles.map_or(0.0, |s| s.max_error),
        );
    }

    let perturbed = config.perturbation.map(|params| {
        let ratios: Vec<f64> = perturbed.iter().zip(&levels).map(|(p, e)| p.deficit.deficit / e.deficit.deficit.abs()).collect();
        let fin = perturbed.last().expect("nonempty levels");
        surface_checks("perturbed_", fin, tol, false, &mut checks);
        checks.push(Check::above("perturbed_deficit_positive", fin.deficit.deficit, 0.0));
        checks.push(Check::above("perturbed_deficit_ratio", *ratios.last().expect("nonempty"), tol.rigidity_factor));
        RigidityReport { params, levels: perturbed, ratios }
    });

    let pass = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        k0: Some(k0.vec3()),
        analytic: Some(analytic),
        levels,
        perturbed,
        rates,
        checks,
        pass,
    })
}

/// Least-squares sphere fit and comparison with the capillary cap the
/// angles predict.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AlexandrovReport {
    /// Coefficient of variation of the mean curvature over interior vertices.
    pub mean_curvature_cv: f64,
    /// `mean_curvature_cv <= CMC_THRESHOLD`; otherwise the fit says nothing.
    pub applicable: bool,
    pub center: Vector3<f64>,
    pub radius: f64,
    /// `max | |x − c| − R |` relative to the fitted radius.
    pub max_radial_deviation: f64,
    pub k0: Vector3<f64>,
    /// Largest distance of `c − R k0` to a wedge plane, relative to `R`:
    /// zero when the center lies on the predicted ray.
    pub center_offset: f64,
    /// `|k0| = 1`: the cap meets the edge tangentially.
    pub edge_tangent: bool,
    /// `|dist(c, edge) − R| / R` for two-plane wedges.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_gap: Option<f64>,
    /// Applicable, deviation and center offset within tolerance.
    pub is_capillary_cap: bool,
}

/// Algebraic sphere fit `|x|² = 2<c, x> + d`, `R² = d + |c|²`.
pub fn fit_sphere(points: &[Vector3<f64>]) -> Option<(Vector3<f64>, f64)> {
    if points.len() < 4 {
        return None;
    }
    // center the data for conditioning
    let mean = points.iter().fold(Vector3::zeros(), |a, p| a + p) / points.len() as f64;
    let a = DMatrix::from_fn(points.len(), 4, |i, j| {
        let p = points[i] - mean;
        if j < 3 {
            2.0 * p[j]
        } else {
            1.0
        }
    });
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| (p - mean).norm_squared()));
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let c = Vector3::new(sol[0], sol[1], sol[2]);
    let r2 = sol[3] + c.norm_squared();
    (r2 > 0.0).then(|| (c + mean, r2.sqrt()))
}

pub fn alexandrov_check(mesh: &TriMesh, wedge: &Wedge, angles: &ContactAngles, tol: f64) -> Result<AlexandrovReport, VerifyError> {
    let k0 = solve_k0(wedge, angles).map_err(step("solving for k0"))?.vec3();
    let normals = wedge.normals3().map_err(step("wedge normals"))?;
    let curv = curvature_field(mesh).map_err(step("curvature"))?;
    let hs: Vec<f64> = (0..mesh.vertex_count()).filter(|&v| !mesh.is_boundary(v)).map(|v| curv[v].mean).collect();
    let n = hs.len().max(1) as f64;
    let mean = hs.iter().sum::<f64>() / n;
    let var = hs.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / n;
    let cv = if mean != 0.0 { var.sqrt() / mean.abs() } else { f64::INFINITY };

    let pts: Vec<Vector3<f64>> = mesh.vertices().iter().map(|p| p.coords).collect();
    let (center, radius) = fit_sphere(&pts).ok_or_else(|| VerifyError::Step {
        context: "sphere fit".into(),
        source: "degenerate point set".into(),
    })?;
    let max_radial_deviation = pts.iter().map(|p| ((p - center).norm() - radius).abs()).fold(0.0, f64::max) / radius;
    let base = center - k0 * radius;
    let center_offset = normals.iter().map(|nm| nm.dot(&base).abs()).fold(0.0, f64::max) / radius;
    let edge_tangent = (k0.norm() - 1.0).abs() <= ADMISSIBLE_TOL;
    let edge_gap = if normals.len() == 2 {
        let l = wedge.edge_direction().map_err(step("edge direction"))?;
        let d = (center - l * center.dot(&l)).norm();
        Some((d - radius).abs() / radius)
    } else {
        None
    };
    let applicable = cv <= CMC_THRESHOLD;
    Ok(AlexandrovReport {
        mean_curvature_cv: cv,
        applicable,
        center,
        radius,
        max_radial_deviation,
        k0,
        center_offset,
        edge_tangent,
        edge_gap,
        is_capillary_cap: applicable && max_radial_deviation < tol && center_offset < tol,
    })
}
