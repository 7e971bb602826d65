//! Volume-form shape derivative of the compliance objective.
//!
//! For a velocity field theta in the vector P1 space of the fine mesh, the
//! derivative of J = 1/2 a(u, u) + kappa |Omega| in direction theta is
//!
//!   dJ(theta) = int_Omega  2 mu eps_theta(u) : eps(u)
//!             + lambda tr(eps_theta(u)) tr(eps(u))
//!             + (div theta) (kappa - mu eps(u):eps(u) - lambda/2 tr(eps(u))^2)
//!
//! with eps_theta(u) = (grad u grad theta + grad theta^T grad u^T) / 2,
//! evaluated with the discrete displacement and cut-cell quadrature. The
//! functional is stored as one coefficient per fine vertex and component.

use crate::cutquad::volume_rule;
use crate::elasticity::{DisplacementField, ElasticMaterial};
use crate::geometry::Point2;
use crate::levelset::CutGeometry;
use crate::mesh::{ElementKind, RefinedMesh};
use crate::parallel::{map_collect, Parallelism};
use crate::shape::ShapeTables;
use nalgebra::{Matrix2, Vector2};
use std::sync::Arc;

/// Linear functional on the vector P1 velocity space: one value per fine
/// vertex and component, in J/m.
#[derive(Debug, Clone)]
pub struct ShapeDerivative {
    pub mesh: Arc<RefinedMesh>,
    pub values: Vec<f64>,
}

impl ShapeDerivative {
    /// Applies the functional to nodal velocity coefficients.
    pub fn apply(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.values.len());
        self.values.iter().zip(theta).map(|(a, b)| a * b).sum()
    }

    /// Applies the functional to the P1 interpolant of a velocity field
    /// (exact for fields already in the space, like constants and x -> x).
    pub fn apply_field(&self, theta: impl Fn(Point2) -> Vector2<f64>) -> f64 {
        let coeffs = field_coefficients(&self.mesh, theta);
        self.apply(&coeffs)
    }
}

/// Nodal coefficients of the P1 interpolant of a vector field.
pub fn field_coefficients(
    mesh: &RefinedMesh,
    theta: impl Fn(Point2) -> Vector2<f64>,
) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(2 * mesh.fine.n_vertices());
    for &p in &mesh.fine.vertices {
        let t = theta(p);
        coeffs.push(t.x);
        coeffs.push(t.y);
    }
    coeffs
}

/// Assembles the discrete shape derivative of the compliance objective.
pub fn shape_derivative(
    u: &DisplacementField,
    material: &ElasticMaterial,
    kappa: f64,
    cutgeom: &CutGeometry,
    par: Parallelism,
) -> ShapeDerivative {
    let space = &u.space;
    let mesh = space.mesh.clone();
    let fine = &mesh.fine;
    let hf = fine.h;
    let (mu, lambda) = (material.mu, material.lambda);
    let tables = ShapeTables::new(fine.kind, 1);
    // integrand degree: grad u twice (each 2k-1 total on quads, k-1 on
    // triangles) times the fine hat gradient
    let degree = match fine.kind {
        ElementKind::Quadrilateral => 4 * space.k as i32,
        ElementKind::Triangle => 2 * space.k as i32,
    };

    // per active coarse element: contributions to its fine vertices
    let locals: Vec<(Vec<usize>, Vec<Vector2<f64>>)> =
        map_collect(par, &space.active_elements, |&e| {
            let mut vertex_ids: Vec<usize> = Vec::new();
            let mut contrib: Vec<Vector2<f64>> = Vec::new();
            for &f in mesh.children(e) {
                let cell = &cutgeom.cells[f];
                if cell.polygons.is_empty() {
                    continue;
                }
                let table = tables.for_element(fine, f);
                let verts = fine.lattice_vertices(f);
                let origin = fine.element_origin(f);
                let base = vertex_ids.len();
                vertex_ids.extend_from_slice(&verts);
                contrib.resize(vertex_ids.len(), Vector2::zeros());
                for poly in &cell.polygons {
                    let rule = volume_rule(poly, degree, hf * hf);
                    for (q, &w) in rule.weights.iter().enumerate() {
                        let p = rule.points[q];
                        let g = u.gradient_in(e, p);
                        let eps = 0.5 * (g + g.transpose());
                        let tr = eps.trace();
                        let energy =
                            mu * eps.component_mul(&eps).sum() + 0.5 * lambda * tr * tr;
                        let pressure = kappa - energy;
                        let eg: Matrix2<f64> = eps * g;
                        let (pu, pv) = ((p.x - origin.x) / hf, (p.y - origin.y) / hf);
                        let (gx, gy) = table.gradients(pu, pv, hf);
                        for i in 0..table.n_nodes() {
                            let grad_psi = Vector2::new(gx[i], gy[i]);
                            // 2 mu (grad_psi^T eps grad u)_c
                            let term1 = 2.0 * mu * (eg.transpose() * grad_psi);
                            // lambda tr(eps) (grad u^T grad_psi)_c
                            let term2 = lambda * tr * (g.transpose() * grad_psi);
                            let v = term1 + term2 + pressure * grad_psi;
                            contrib[base + i] += w * v;
                        }
                    }
                }
            }
            (vertex_ids, contrib)
        });

    let mut values = vec![0.0; 2 * fine.n_vertices()];
    for (vertex_ids, contrib) in locals {
        for (&v, c) in vertex_ids.iter().zip(contrib) {
            values[2 * v] += c.x;
            values[2 * v + 1] += c.y;
        }
    }
    ShapeDerivative { mesh, values }
}
