//! Level-set shape and topology optimization of 2D linear elastic structures
//! on a fixed background mesh.
//!
//! The structure is the positive region of a piecewise linear level-set
//! function living on a uniform refinement of the background mesh. Elements
//! cut by the zero level set are integrated over their clipped material
//! region, Dirichlet conditions are imposed weakly (Nitsche), and face-jump
//! penalties near the boundary keep the stiffness matrix well conditioned
//! regardless of how the boundary cuts the mesh. The design is driven to
//! lower compliance plus material cost by transporting the level-set along a
//! regularized descent velocity built from a volume-form shape derivative.
//!
//! Pipeline modules:
//! - [`mesh`]: background grid, interior faces, uniform refinement
//! - [`levelset`]: level-set field, domain classification, cut-geometry
//!   extraction, signed-distance reinitialization
//! - [`cutquad`]: quadrature on clipped polygons, segments and faces
//! - [`elasticity`]: stabilized cut finite element assembly and solve
//! - [`shapeopt`]: shape derivative, descent velocity, level-set transport,
//!   connectivity filtering and the optimization loop
//! - [`linsolve`]: banded direct solvers and condition estimation
//! - [`problems`]: model problem presets (cantilever, L-shape)
//! - [`io`]: VTK / SVG / CSV output

pub mod cutquad;
pub mod elasticity;
pub mod geometry;
pub mod io;
pub mod levelset;
pub mod linsolve;
pub mod mesh;
pub mod parallel;
pub mod problems;
pub mod shape;
pub mod shapeopt;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{side} length {length} is not an integer multiple of h = {h}")]
    MeshDivisibility { side: &'static str, length: f64, h: f64 },
    #[error("void rectangle must lie on grid lines and inside the domain")]
    InvalidVoid,
    #[error("face {0} is not an interior face")]
    NotInteriorFace(usize),
    #[error("polynomial degree k = {0} is outside the supported range 1..=4")]
    UnsupportedDegree(usize),
    #[error("degenerate domain: the level set leaves no material{0}")]
    DegenerateDomain(&'static str),
    #[error("no material component touches the Dirichlet boundary")]
    DetachedFromDirichlet,
    #[error("linear solve failed: {0}")]
    Solve(#[from] linsolve::SolveError),
    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
