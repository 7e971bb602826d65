//! Stabilized cut finite element discretization of linear elasticity and the
//! compliance objective.
//!
//! The system on the active mesh combines the bulk form over clipped
//! material regions, ghost penalties on the face sets near the boundary
//! (full strength near Dirichlet, h^2-scaled near Neumann), Nitsche terms
//! for the Dirichlet data and the fixed surface load. The objective adds the
//! material cost: J = 1/2 a(u, u) + kappa |Omega|, with the unstabilized
//! bulk form.

mod assemble;
mod space;

pub use assemble::{
    assemble_bulk, assemble_ghost_penalty, assemble_load, assemble_nitsche, DirichletSegment,
    LoadedSegment,
};
pub use space::FESpace;

use crate::geometry::Point2;
use crate::levelset::{BoundarySpec, CutGeometry, DomainClassification};
use crate::linsolve::{CsrMatrix, FactoredMatrix};
use crate::parallel::{map_collect, Parallelism};
use crate::{Error, Result};
use nalgebra::{Matrix2, Vector2};
use std::sync::Arc;

/// Isotropic linear elastic material, plane strain.
#[derive(Debug, Clone, Copy)]
pub struct ElasticMaterial {
    pub e: f64,
    pub nu: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl ElasticMaterial {
    pub fn new(e: f64, nu: f64) -> Result<Self> {
        if !(e > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Young's modulus must be positive, got {e}"
            )));
        }
        if !(nu > 0.0 && nu < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio must lie in (0, 0.5), got {nu}"
            )));
        }
        let mu = e / (2.0 * (1.0 + nu));
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        Ok(ElasticMaterial { e, nu, mu, lambda })
    }
}

/// Ghost-penalty and Nitsche weights.
#[derive(Debug, Clone)]
pub struct StabilizationParams {
    /// one weight per normal-derivative order 1..=k
    pub gamma_j: Vec<f64>,
    pub gamma_d: f64,
}

impl StabilizationParams {
    /// gamma_D = 10 k^2 (mu + lambda), gamma_j = 1e-7 (mu + lambda).
    pub fn defaults(k: usize, material: &ElasticMaterial) -> Self {
        let ml = material.mu + material.lambda;
        StabilizationParams {
            gamma_j: vec![1e-7 * ml; k],
            gamma_d: 10.0 * (k * k) as f64 * ml,
        }
    }
}

/// Assembled symmetric system.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Dirichlet and loaded segments of the outer boundary restricted to active
/// boundary faces. Loaded faces on inactive elements are reported so callers
/// can detect a load detaching from the material.
pub fn boundary_segments(
    space: &FESpace,
    boundary: &BoundarySpec,
) -> (Vec<DirichletSegment>, Vec<LoadedSegment>, usize) {
    let coarse = &space.mesh.coarse;
    let tol = 1e-9 * coarse.h;
    let mut dirichlet = Vec::new();
    let mut loaded = Vec::new();
    let mut skipped_loads = 0usize;
    for bf in &coarse.boundary_faces {
        let a = coarse.vertices[bf.vertices[0]];
        let b = coarse.vertices[bf.vertices[1]];
        let active = space.is_active[bf.element];
        for seg in &boundary.dirichlet {
            if let Some((ca, cb)) = seg.clip_collinear(a, b, tol) {
                if active {
                    dirichlet.push(DirichletSegment {
                        element: bf.element,
                        a: ca,
                        b: cb,
                        normal: bf.normal,
                    });
                }
            }
        }
        for load in &boundary.loads {
            if let Some((ca, cb)) = load.segment.clip_collinear(a, b, tol) {
                if active {
                    loaded.push(LoadedSegment {
                        element: bf.element,
                        a: ca,
                        b: cb,
                        traction: load.traction,
                    });
                } else {
                    skipped_loads += 1;
                }
            }
        }
    }
    (dirichlet, loaded, skipped_loads)
}

/// Assembles the full stabilized system with homogeneous Dirichlet data.
pub fn assemble_system(
    space: &FESpace,
    material: &ElasticMaterial,
    cutgeom: &CutGeometry,
    classification: &DomainClassification,
    boundary: &BoundarySpec,
    params: &StabilizationParams,
    par: Parallelism,
) -> LinearSystem {
    assemble_system_with_data(
        space,
        material,
        cutgeom,
        classification,
        boundary,
        params,
        &|_| Vector2::zeros(),
        par,
    )
}

/// Assembles the full stabilized system with Dirichlet data `g_d`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_system_with_data(
    space: &FESpace,
    material: &ElasticMaterial,
    cutgeom: &CutGeometry,
    classification: &DomainClassification,
    boundary: &BoundarySpec,
    params: &StabilizationParams,
    g_d: &(dyn Fn(Point2) -> Vector2<f64> + Sync),
    par: Parallelism,
) -> LinearSystem {
    let h = space.mesh.coarse.h;
    let mut triplets = assemble_bulk(space, material, cutgeom, classification, par);
    let ghost_d =
        assemble_ghost_penalty(space, &classification.fhd_faces, &params.gamma_j, 1.0, par);
    triplets.add_scaled(&ghost_d, 1.0);
    let ghost_n =
        assemble_ghost_penalty(space, &classification.fhn_faces, &params.gamma_j, h * h, par);
    triplets.add_scaled(&ghost_n, 1.0);

    let (dirichlet, loaded, skipped) = boundary_segments(space, boundary);
    if skipped > 0 {
        eprintln!("assemble_system: {skipped} loaded boundary face(s) have no active element");
    }
    if dirichlet.is_empty() && loaded.iter().any(|l| l.traction != Vector2::zeros()) {
        eprintln!("assemble_system: loaded system without Dirichlet segments; rigid modes are unconstrained");
    }
    let (nitsche, nitsche_rhs) =
        assemble_nitsche(space, material, &dirichlet, params.gamma_d, g_d, par);
    triplets.add_scaled(&nitsche, 1.0);

    let mut rhs = assemble_load(space, &loaded);
    for (r, n) in rhs.iter_mut().zip(nitsche_rhs) {
        *r += n;
    }
    LinearSystem { matrix: triplets.to_csr(), rhs }
}

/// Coefficients of the discrete displacement on its space.
#[derive(Debug, Clone)]
pub struct DisplacementField {
    pub space: Arc<FESpace>,
    pub values: Vec<f64>,
}

impl DisplacementField {
    pub fn zero(space: Arc<FESpace>) -> Self {
        let n = space.n_dofs();
        DisplacementField { space, values: vec![0.0; n] }
    }

    /// Displacement at a point of the active mesh; `None` outside.
    pub fn eval(&self, p: Point2) -> Option<Vector2<f64>> {
        let e = self.space.mesh.coarse.locate(p)?;
        if !self.space.is_active[e] {
            return None;
        }
        let (u, v) = self.space.local_coords(e, p);
        let table = self.space.table(e);
        let vals = table.values(u, v);
        let dofs = self.space.element_dofs(e);
        let mut out = Vector2::zeros();
        for i in 0..table.n_nodes() {
            out.x += self.values[dofs[2 * i]] * vals[i];
            out.y += self.values[dofs[2 * i + 1]] * vals[i];
        }
        Some(out)
    }

    /// Displacement gradient (Jacobian) at a point of element `e`.
    pub fn gradient_in(&self, e: usize, p: Point2) -> Matrix2<f64> {
        let (u, v) = self.space.local_coords(e, p);
        let table = self.space.table(e);
        let h = self.space.mesh.coarse.h;
        let (gx, gy) = table.gradients(u, v, h);
        let dofs = self.space.element_dofs(e);
        let mut g = Matrix2::zeros();
        for i in 0..table.n_nodes() {
            let ux = self.values[dofs[2 * i]];
            let uy = self.values[dofs[2 * i + 1]];
            g[(0, 0)] += ux * gx[i];
            g[(0, 1)] += ux * gy[i];
            g[(1, 0)] += uy * gx[i];
            g[(1, 1)] += uy * gy[i];
        }
        g
    }

    /// Nodal displacement at a fine vertex (zero off the active mesh).
    pub fn at_vertex(&self, vertex: usize) -> Vector2<f64> {
        let n = self.space.node_index[vertex];
        if n == crate::mesh::INVALID {
            Vector2::zeros()
        } else {
            Vector2::new(self.values[2 * n], self.values[2 * n + 1])
        }
    }
}

/// Direct solve of the assembled system with the residual contract of the
/// solver module.
pub fn solve(system: &LinearSystem, space: Arc<FESpace>) -> Result<DisplacementField> {
    let factored = FactoredMatrix::new(system.matrix.clone())?;
    let values = factored.solve(&system.rhs)?;
    Ok(DisplacementField { space, values })
}

/// Compliance objective with material cost.
#[derive(Debug, Clone, Copy)]
pub struct Objective {
    pub j: f64,
    pub compliance: f64,
    pub volume: f64,
}

/// Evaluates J = 1/2 a(u, u) + kappa |Omega| over the clipped material
/// region (the unstabilized bulk form).
pub fn objective(
    u: &DisplacementField,
    material: &ElasticMaterial,
    cutgeom: &CutGeometry,
    classification: &DomainClassification,
    kappa: f64,
    par: Parallelism,
) -> Objective {
    let space = &u.space;
    let degree = space.bulk_degree();
    let energies: Vec<f64> = map_collect(par, &space.active_elements, |&e| {
        let rule = assemble::material_rule(space, cutgeom, classification, e, degree);
        let mut acc = 0.0;
        for (q, &w) in rule.weights.iter().enumerate() {
            let g = u.gradient_in(e, rule.points[q]);
            let eps = 0.5 * (g + g.transpose());
            let tr = eps.trace();
            acc += w
                * (2.0 * material.mu * (eps.component_mul(&eps)).sum()
                    + material.lambda * tr * tr);
        }
        acc
    });
    let compliance = 0.5 * energies.iter().sum::<f64>();
    let volume = cutgeom.material_area();
    Objective { j: compliance + kappa * volume, compliance, volume }
}

/// Von Mises stress at a point of element `e` under plane strain.
pub fn von_mises(u: &DisplacementField, material: &ElasticMaterial, e: usize, p: Point2) -> f64 {
    let g = u.gradient_in(e, p);
    let eps = 0.5 * (g + g.transpose());
    let tr = eps.trace();
    let sx = 2.0 * material.mu * eps[(0, 0)] + material.lambda * tr;
    let sy = 2.0 * material.mu * eps[(1, 1)] + material.lambda * tr;
    let sz = material.lambda * tr;
    let txy = 2.0 * material.mu * eps[(0, 1)];
    (0.5 * ((sx - sy).powi(2) + (sy - sz).powi(2) + (sz - sx).powi(2)) + 3.0 * txy * txy).sqrt()
}
