//! Capillary surfaces: analytic spherical caps, clipped cap meshes,
//! boundary-flat perturbations and boundary frames.

pub mod cap;
pub mod frames;
pub mod io;
pub mod mesh;
pub mod perturb;
pub mod shapes;
pub mod smooth;

use std::sync::OnceLock;

use nalgebra::{Point3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::curvature::{curvature_field, CurvatureData, CurvatureError};
use crate::wedge::{solve_k0, CapillaryVector, ContactAngles, Wedge, WedgeError};

pub use cap::{generate_cap, SphericalCap};
pub use frames::{boundary_frames, BoundaryFrame, FrameSource};
pub use io::{load_mesh, save_mesh};
pub use mesh::TriMesh;
pub use perturb::{perturb, PerturbationParams};
pub use smooth::SmoothCap;

/// Plane distance within which a boundary vertex counts as incident.
pub const PLANE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no vertices or no faces")]
    Empty,
    #[error("face {face} references vertex {index} but the mesh has {vertices} vertices")]
    IndexOutOfRange { face: usize, index: usize, vertices: usize },
    #[error("face {face} is degenerate (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },
    #[error("edge ({a}, {b}) is non-manifold or inconsistently oriented")]
    NonManifold { a: usize, b: usize },
    #[error("boundary walk broke off at vertex {0}")]
    OpenLoop(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported mesh format {0:?} (expected .off or .obj)")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Wedge(#[from] WedgeError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("inadmissible contact angles: {0}")]
    NotAdmissible(String),
    #[error("the sphere does not meet the wedge interior")]
    EmptyCap,
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("resolution must be at least {min}, got {got}")]
    InvalidResolution { got: usize, min: usize },
    #[error("surface is not meshable: {0}")]
    NotMeshable(String),
    #[error("perturbation amplitude must be finite and nonnegative, got {0}")]
    InvalidAmplitude(f64),
    #[error("perturbed surface lost mean convexity at vertex {vertex} (H = {mean:e})")]
    LostMeanConvexity { vertex: usize, mean: f64 },
    #[error("perturbed surface self-intersects: faces {a} and {b} overlap")]
    SelfIntersection { a: usize, b: usize },
    #[error("boundary vertex {vertex} lies on no wedge plane (nearest distance {distance:e})")]
    UnassignedBoundary { vertex: usize, distance: f64 },
    #[error("surface has no boundary")]
    NoBoundary,
    #[error("operation needs ambient dimension 3")]
    NotThreeDimensional,
}

/// Where a mesh vertex sits relative to the wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexTag {
    Interior,
    Plane(usize),
    Edge,
}

/// Mesh with its wedge tagging and, for generated caps, the smooth surface it
/// samples.
#[derive(Debug, Clone)]
pub struct MeshSurface {
    pub(crate) mesh: TriMesh,
    pub(crate) tags: Vec<VertexTag>,
    pub(crate) backing: Option<SmoothBacking>,
    pub(crate) curvature: OnceLock<Result<Vec<CurvatureData>, CurvatureError>>,
}

/// Smooth parametrization behind a generated mesh: vertex `i` is
/// `smooth.point(&dirs[i])`.
#[derive(Debug, Clone)]
pub struct SmoothBacking {
    pub smooth: SmoothCap,
    pub dirs: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub enum SurfaceKind {
    Analytic(SphericalCap),
    Mesh(MeshSurface),
}

/// A hypersurface with boundary in a wedge, with its target contact angles.
#[derive(Debug, Clone)]
pub struct CapillarySurface {
    kind: SurfaceKind,
    wedge: Wedge,
    target_angles: ContactAngles,
    k0: CapillaryVector,
}

impl MeshSurface {
    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn tags(&self) -> &[VertexTag] {
        &self.tags
    }

    pub fn backing(&self) -> Option<&SmoothBacking> {
        self.backing.as_ref()
    }

    /// Quadric-fit curvature at every vertex, computed once.
    pub fn curvature(&self) -> Result<&[CurvatureData], CurvatureError> {
        match self.curvature.get_or_init(|| curvature_field(&self.mesh)) {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }
}

impl CapillarySurface {
    pub(crate) fn new_analytic(cap: SphericalCap, wedge: Wedge, target_angles: ContactAngles, k0: CapillaryVector) -> Self {
        CapillarySurface { kind: SurfaceKind::Analytic(cap), wedge, target_angles, k0 }
    }

    pub(crate) fn new_mesh(
        mesh: TriMesh,
        tags: Vec<VertexTag>,
        backing: Option<SmoothBacking>,
        wedge: Wedge,
        target_angles: ContactAngles,
        k0: CapillaryVector,
    ) -> Self {
        let ms = MeshSurface { mesh, tags, backing, curvature: OnceLock::new() };
        CapillarySurface { kind: SurfaceKind::Mesh(ms), wedge, target_angles, k0 }
    }

    /// Wraps an arbitrary mesh whose boundary lies on the wedge planes.
    pub fn from_mesh(mesh: TriMesh, wedge: Wedge, target_angles: ContactAngles) -> Result<Self, SurfaceError> {
        if wedge.ambient_dim() != 3 {
            return Err(SurfaceError::NotThreeDimensional);
        }
        let k0 = solve_k0(&wedge, &target_angles)?;
        let tags = tag_vertices(&mesh, &wedge.normals3()?)?;
        Ok(Self::new_mesh(mesh, tags, None, wedge, target_angles, k0))
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn wedge(&self) -> &Wedge {
        &self.wedge
    }

    pub fn target_angles(&self) -> &ContactAngles {
        &self.target_angles
    }

    pub fn k0(&self) -> &CapillaryVector {
        &self.k0
    }

    pub fn as_cap(&self) -> Option<&SphericalCap> {
        match &self.kind {
            SurfaceKind::Analytic(c) => Some(c),
            SurfaceKind::Mesh(_) => None,
        }
    }

    pub fn as_mesh(&self) -> Option<&MeshSurface> {
        match &self.kind {
            SurfaceKind::Mesh(m) => Some(m),
            SurfaceKind::Analytic(_) => None,
        }
    }

    /// The smooth surface behind this one, if known exactly.
    pub fn smooth(&self) -> Option<SmoothCap> {
        match &self.kind {
            SurfaceKind::Analytic(c) => Some(SmoothCap::exact(c.clone())),
            SurfaceKind::Mesh(m) => m.backing.as_ref().map(|b| b.smooth.clone()),
        }
    }

    /// Length scale used for relative tolerances.
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            SurfaceKind::Analytic(c) => c.diameter(),
            SurfaceKind::Mesh(m) => m.mesh.diameter(),
        }
    }

    /// Clipped triangle mesh of an analytic cap at its stored resolution; a
    /// mesh surface is returned unchanged.
    pub fn to_mesh(&self) -> Result<CapillarySurface, SurfaceError> {
        match &self.kind {
            SurfaceKind::Analytic(c) => cap::mesh_cap(c, &self.wedge, &self.target_angles, &self.k0, c.resolution),
            SurfaceKind::Mesh(_) => Ok(self.clone()),
        }
    }

    /// Same as [`to_mesh`](Self::to_mesh) at an explicit subdivision depth.
    pub fn to_mesh_at(&self, resolution: usize) -> Result<CapillarySurface, SurfaceError> {
        match &self.kind {
            SurfaceKind::Analytic(c) => cap::mesh_cap(c, &self.wedge, &self.target_angles, &self.k0, resolution),
            SurfaceKind::Mesh(_) => Err(SurfaceError::NotMeshable("already a mesh".into())),
        }
    }

    /// Uniform scaling about the origin; planes through the origin are kept.
    pub fn scaled(&self, lambda: f64) -> Result<CapillarySurface, SurfaceError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(SurfaceError::InvalidRadius(lambda));
        }
        Ok(match &self.kind {
            SurfaceKind::Analytic(c) => {
                Self::new_analytic(c.scaled(lambda), self.wedge.clone(), self.target_angles.clone(), self.k0.clone())
            }
            SurfaceKind::Mesh(m) => {
                let mesh = m.mesh.map_vertices(|_, p| Point3::from(p.coords * lambda))?;
                let backing = m.backing.as_ref().map(|b| SmoothBacking { smooth: b.smooth.scaled(lambda), dirs: b.dirs.clone() });
                Self::new_mesh(mesh, m.tags.clone(), backing, self.wedge.clone(), self.target_angles.clone(), self.k0.clone())
            }
        })
    }
}

/// Tags each vertex by plane incidence; boundary vertices must be on a plane.
pub fn tag_vertices(mesh: &TriMesh, normals: &[Vector3<f64>]) -> Result<Vec<VertexTag>, SurfaceError> {
    let tol = PLANE_TOL * mesh.diameter().max(1.0);
    let mut tags = Vec::with_capacity(mesh.vertex_count());
    for (v, p) in mesh.vertices().iter().enumerate() {
        if !mesh.is_boundary(v) {
            tags.push(VertexTag::Interior);
            continue;
        }
        let d: Vec<f64> = normals.iter().map(|n| n.dot(&p.coords).abs()).collect();
        let on: Vec<usize> = (0..d.len()).filter(|&i| d[i] <= tol).collect();
        tags.push(match on.len() {
            0 => {
                let distance = d.iter().copied().fold(f64::INFINITY, f64::min);
                return Err(SurfaceError::UnassignedBoundary { vertex: v, distance });
            }
            1 => VertexTag::Plane(on[0]),
            _ => VertexTag::Edge,
        });
    }
    Ok(tags)
}
