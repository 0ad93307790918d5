//! `capillary`: generate capillary caps, run the individual checks, and
//! produce full verification reports.
//!
//! Every command prints JSON lines on stdout. Exit status is 0 when the
//! check passes, 1 when it fails, 2 on invalid input.

use std::path::PathBuf;
use std::process::ExitCode;

use capillary::curvature::curvature_field;
use capillary::foliation::{
    elliptic_point, first_touch_exterior, first_touch_interior, sample_interior, sweepout_coverage,
};
use capillary::integrals::{
    area, hk_deficit_wedge, hk_refined_closed, minkowski_residual, structural_residual,
};
use capillary::surface::shapes::{ellipsoid, icosphere};
use capillary::surface::{generate_cap, load_mesh, perturb, save_mesh, CapillarySurface, TriMesh};
use capillary::verify::{alexandrov_check, run_suite, Scenario, VerificationConfig};
use capillary::wedge::{ContactAngles, Wedge};
use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;
use serde_json::json;

type Error = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "capillary", version, about = "Capillary surface generation and Heintze-Karcher verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    /// TOML or JSON verification config supplying scenario, angles, radius and levels.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Half-space contact angle.
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    /// Wedge opening angle.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// Icosphere subdivision depth.
    #[arg(long)]
    res: Option<usize>,
    /// Closed ellipsoid semi-axes `a,b,c` instead of a capillary cap.
    #[arg(long, value_parser = parse_vec3)]
    axes: Option<Vector3<f64>>,
    /// Load the surface from an OFF/OBJ file instead of generating it.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Use the closed-form cap rather than its mesh.
    #[arg(long)]
    analytic: bool,
    /// Perturbation amplitude applied to the generated cap.
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long, default_value_t = 2)]
    mode: u32,
    #[arg(long, default_value_t = 0)]
    perturb_seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a cap mesh.
    GenCap {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a cap and apply a boundary-flat perturbation.
    Perturb {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Heintze-Karcher deficit; fails when it is below `-tol |Ω|`.
    CheckHk {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Minkowski residuals for r = 1, 2 relative to the area.
    CheckMinkowski {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Structural boundary identity residual relative to the area.
    CheckStructural {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Sweepout coverage of the enclosed region by first touches.
    Sweepout {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        sample_seed: u64,
        /// Also print every touch event.
        #[arg(long)]
        events: bool,
    },
    /// First touch of the sphere family from one seed point.
    FirstTouch {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Seed point `x,y,z`.
        #[arg(long = "seed", value_parser = parse_vec3, allow_hyphen_values = true)]
        point: Vector3<f64>,
        /// Search from outside (largest enclosing sphere first).
        #[arg(long)]
        exterior: bool,
    },
    /// Locate an elliptic point by the exterior first touch.
    EllipticPoint {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Sphere fit and comparison with the predicted capillary cap.
    Alexandrov {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Per-vertex principal curvatures.
    CurvatureReport {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Run the full verification suite described by a config.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Report path (overrides the config's `output`).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_vec3(s: &str) -> Result<Vector3<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x, y, z] => Ok(Vector3::new(*x, *y, *z)),
        _ => Err(format!("expected three comma-separated numbers, got {}", v.len())),
    }
}

/// Failure of the check itself, as opposed to bad input.
enum Outcome {
    Pass,
    Fail,
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn emit(value: serde_json::Value) {
    println!("{value}");
}

impl SurfaceArgs {
    fn config(&self) -> Result<Option<VerificationConfig>, Error> {
        Ok(match &self.config {
            Some(p) => Some(VerificationConfig::load(p)?),
            None => None,
        })
    }

    fn resolution(&self, cfg: Option<&VerificationConfig>) -> usize {
        self.res.or_else(|| cfg.and_then(|c| c.levels.last().copied())).unwrap_or(5)
    }

    fn wedge(&self, cfg: Option<&VerificationConfig>) -> Result<(Wedge, ContactAngles), Error> {
        let mut c = cfg.cloned().unwrap_or_else(|| {
            let scenario = if self.theta0.is_some() { Scenario::Halfspace } else { Scenario::Wedge };
            VerificationConfig::new(scenario)
        });
        // flags override the config
        c.theta0 = self.theta0.or(c.theta0);
        c.theta1 = self.theta1.or(c.theta1);
        c.theta2 = self.theta2.or(c.theta2);
        c.alpha = self.alpha.or(c.alpha);
        if c.scenario == Scenario::Wedge && c.theta1.is_none() && c.theta0.is_none() {
            return Err("give --theta0 (half-space) or --theta1, --theta2, --alpha (wedge)".into());
        }
        if c.theta0.is_some() && c.theta1.is_none() {
            c.scenario = Scenario::Halfspace;
        }
        Ok(c.wedge()?)
    }

    /// A closed mesh when asked for one (`--axes`, a closed `--mesh`, or a
    /// closed-scenario config).
    fn closed(&self, cfg: Option<&VerificationConfig>) -> Result<Option<TriMesh>, Error> {
        let res = self.resolution(cfg);
        if let Some(ax) = self.axes {
            return Ok(Some(ellipsoid(res, [ax.x, ax.y, ax.z])?));
        }
        if let Some(p) = &self.mesh {
            let m = load_mesh(p)?;
            return Ok(m.is_closed().then_some(m));
        }
        if let Some(c) = cfg.filter(|c| c.scenario == Scenario::Closed) {
            let radius = self.radius.unwrap_or(c.radius);
            return Ok(Some(match c.semi_axes {
                Some(ax) => ellipsoid(res, ax)?,
                None => icosphere(res, Vector3::zeros(), radius)?,
            }));
        }
        Ok(None)
    }

    fn surface(&self) -> Result<CapillarySurface, Error> {
        let cfg = self.config()?;
        let cfg = cfg.as_ref();
        let (wedge, angles) = self.wedge(cfg)?;
        if let Some(p) = &self.mesh {
            return Ok(CapillarySurface::from_mesh(load_mesh(p)?, wedge, angles)?);
        }
        let radius = self.radius.or(cfg.map(|c| c.radius)).unwrap_or(1.0);
        let res = self.resolution(cfg);
        let cap = generate_cap(&wedge, &angles, radius, res)?;
        let amplitude = self.amplitude.or(cfg.and_then(|c| c.perturbation.map(|p| p.amplitude)));
        if let Some(a) = amplitude {
            return Ok(perturb(&cap.to_mesh()?, a, self.mode, self.perturb_seed)?);
        }
        if self.analytic {
            Ok(cap)
        } else {
            Ok(cap.to_mesh()?)
        }
    }
}

fn mesh_of(s: &CapillarySurface) -> Result<&TriMesh, Error> {
    s.as_mesh().map(|m| m.mesh()).ok_or_else(|| "this command needs a mesh surface (drop --analytic)".into())
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::GenCap { surface, output } | Command::Perturb { surface, output } => {
            let s = surface.surface()?;
            let mesh = mesh_of(&s)?;
            save_mesh(mesh, &output)?;
            emit(json!({ "output": output, "stats": mesh.stats(), "k0": s.k0().vec3() }));
            Ok(Outcome::Pass)
        }
        Command::CheckHk { surface, tol } => {
            let cfg = surface.config()?;
            if let Some(mesh) = surface.closed(cfg.as_ref())? {
                let rep = hk_refined_closed(&mesh)?;
                let ok = rep.report.relative_deficit >= -tol;
                emit(serde_json::to_value(&rep)?);
                return Ok(verdict(ok));
            }
            let s = surface.surface()?;
            let rep = hk_deficit_wedge(&s, s.k0())?;
            let ok = rep.relative_deficit >= -tol;
            emit(serde_json::to_value(&rep)?);
            Ok(verdict(ok))
        }
        Command::CheckMinkowski { surface, tol } => {
            let s = surface.surface()?;
            let a = area(&s);
            let res = [minkowski_residual(&s, s.k0(), 1)?, minkowski_residual(&s, s.k0(), 2)?];
            let ok = res.iter().all(|r| r.abs() / a < tol);
            emit(json!({ "area": a, "residuals": res, "relative": [res[0].abs() / a, res[1].abs() / a], "pass": ok }));
            Ok(verdict(ok))
        }
        Command::CheckStructural { surface, tol } => {
            let s = surface.surface()?;
            let a = area(&s);
            let r = structural_residual(&s)?;
            let ok = r.norm() / a < tol;
            emit(json!({ "area": a, "residual": r, "norm": r.norm(), "relative": r.norm() / a, "pass": ok }));
            Ok(verdict(ok))
        }
        Command::Sweepout { surface, samples, sample_seed, events } => {
            let s = surface.surface()?;
            if events {
                for y in sample_interior(&s, samples, sample_seed)? {
                    match first_touch_interior(&y, s.k0(), &s) {
                        Ok(ev) => emit(serde_json::to_value(&ev)?),
                        Err(e) => emit(json!({ "seed": y, "error": e.to_string() })),
                    }
                }
            }
            let rep = sweepout_coverage(&s, s.k0(), samples, sample_seed)?;
            let ok = rep.covered == rep.samples && rep.violations == 0;
            emit(serde_json::to_value(&rep)?);
            Ok(verdict(ok))
        }
        Command::FirstTouch { surface, point, exterior } => {
            let s = surface.surface()?;
            let ev = if exterior { first_touch_exterior(&point, s.k0(), &s)? } else { first_touch_interior(&point, s.k0(), &s)? };
            let ok = !ev.violation;
            emit(serde_json::to_value(&ev)?);
            Ok(verdict(ok))
        }
        Command::EllipticPoint { surface } => {
            let s = surface.surface()?;
            let e = elliptic_point(&s, s.k0())?;
            emit(serde_json::to_value(&e)?);
            Ok(verdict(e.passes))
        }
        Command::Alexandrov { surface, tol } => {
            let s = surface.surface()?;
            let rep = alexandrov_check(mesh_of(&s)?, s.wedge(), s.target_angles(), tol)?;
            emit(serde_json::to_value(&rep)?);
            Ok(verdict(rep.is_capillary_cap))
        }
        Command::CurvatureReport { surface } => {
            let cfg = surface.config()?;
            let mesh = match surface.closed(cfg.as_ref())? {
                Some(m) => m,
                None => mesh_of(&surface.surface()?)?.clone(),
            };
            for (v, c) in curvature_field(&mesh)?.iter().enumerate() {
                emit(json!({ "vertex": v, "kappas": c.kappas, "mean": c.mean, "normal": c.normal }));
            }
            Ok(Outcome::Pass)
        }
        Command::Report { config, output } => {
            let cfg = VerificationConfig::load(&config)?;
            let rep = run_suite(&cfg)?;
            if let Some(path) = output.or(cfg.output.clone()) {
                rep.write(&path)?;
            }
            emit(serde_json::to_value(&rep)?);
            Ok(verdict(rep.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
