//! Assembly of the stabilized cut finite element system: bulk elasticity on
//! clipped material regions, ghost-penalty face terms, Nitsche boundary
//! terms and the surface load vector.
//!
//! The parallel paths compute per-element (or per-face) local contributions
//! in a deterministic order and gather them sequentially, so results are
//! independent of the execution policy.

use super::space::FESpace;
use super::ElasticMaterial;
use crate::cutquad::{face_rule, line_rule, volume_rule, QuadratureRule};
use crate::geometry::Point2;
use crate::levelset::{CutGeometry, DomainClassification, ElementStatus};
use crate::linsolve::TripletMatrix;
use crate::mesh::INVALID;
use crate::parallel::{map_collect, Parallelism};
use nalgebra::{DMatrix, Vector2};

/// Quadrature over the material region of an active element: the whole
/// element when it is inside, the clipped polygons of its fine children
/// when it is cut.
pub(crate) fn material_rule(
    space: &FESpace,
    cutgeom: &CutGeometry,
    classification: &DomainClassification,
    e: usize,
    degree: i32,
) -> QuadratureRule {
    let mesh = &space.mesh;
    let scale = mesh.fine.h * mesh.fine.h;
    match classification.status[e] {
        ElementStatus::Inside => volume_rule(&mesh.coarse.element_polygon(e), degree, scale),
        ElementStatus::Outside => QuadratureRule::default(),
        ElementStatus::Cut => {
            let mut rule = QuadratureRule::default();
            for &f in mesh.children(e) {
                for poly in &cutgeom.cells[f].polygons {
                    let part = volume_rule(poly, degree, scale);
                    rule.points.extend(part.points);
                    rule.weights.extend(part.weights);
                }
            }
            rule
        }
    }
}

/// Bulk form 2 mu (eps(u), eps(v)) + lambda (div u, div v) over the material
/// region.
pub fn assemble_bulk(
    space: &FESpace,
    material: &ElasticMaterial,
    cutgeom: &CutGeometry,
    classification: &DomainClassification,
    par: Parallelism,
) -> TripletMatrix {
    let degree = space.bulk_degree();
    let (mu, lambda) = (material.mu, material.lambda);
    let h = space.mesh.coarse.h;
    let locals: Vec<(Vec<usize>, DMatrix<f64>)> =
        map_collect(par, &space.active_elements, |&e| {
            let table = space.table(e);
            let npe = table.n_nodes();
            let mut local = DMatrix::zeros(2 * npe, 2 * npe);
            let rule = material_rule(space, cutgeom, classification, e, degree);
            for (q, &w) in rule.weights.iter().enumerate() {
                let (u, v) = space.local_coords(e, rule.points[q]);
                let (gx, gy) = table.gradients(u, v, h);
                for i in 0..npe {
                    let gi = [gx[i], gy[i]];
                    for j in 0..npe {
                        let gj = [gx[j], gy[j]];
                        let dot = gi[0] * gj[0] + gi[1] * gj[1];
                        for c in 0..2 {
                            for d in 0..2 {
                                // mu (delta_cd grad_i . grad_j + d_d b_i d_c b_j)
                                //   + lambda d_c b_i d_d b_j
                                let mut val = mu * gi[d] * gj[c] + lambda * gi[c] * gj[d];
                                if c == d {
                                    val += mu * dot;
                                }
                                local[(2 * i + c, 2 * j + d)] += w * val;
                            }
                        }
                    }
                }
            }
            (space.element_dofs(e), local)
        });
    gather(space.n_dofs(), locals)
}

/// Ghost-penalty form over a face set: for each face, normal-derivative
/// jumps of order 1..=k weighted by `gamma_j h^(2j-1)`, optionally scaled
/// (the Neumann set enters with an extra h^2).
pub fn assemble_ghost_penalty(
    space: &FESpace,
    face_ids: &[usize],
    gamma: &[f64],
    scale: f64,
    par: Parallelism,
) -> TripletMatrix {
    let k = space.k;
    assert_eq!(gamma.len(), k, "one gamma per derivative order");
    let coarse_h = space.mesh.coarse.h;
    let degree = space.line_degree();
    let locals: Vec<(Vec<usize>, DMatrix<f64>)> = map_collect(par, face_ids, |&face_id| {
        let face = &space.mesh.coarse.interior_faces[face_id];
        let (kp, km) = (face.kplus, face.kminus);
        let a = space.mesh.coarse.vertices[face.vertices[0]];
        let b = space.mesh.coarse.vertices[face.vertices[1]];
        let rule = face_rule(a, b, degree);

        // union of the two elements' nodes; shared nodes merge so the jump of
        // a global basis function is its K+ trace minus its K- trace
        let nodes_p = space.mesh.nodes(kp);
        let nodes_m = space.mesh.nodes(km);
        let mut union_nodes: Vec<usize> = Vec::with_capacity(nodes_p.len() + nodes_m.len());
        let local_of = |v: usize, union_nodes: &mut Vec<usize>| -> usize {
            match union_nodes.iter().position(|&u| u == v) {
                Some(i) => i,
                None => {
                    union_nodes.push(v);
                    union_nodes.len() - 1
                }
            }
        };
        let map_p: Vec<usize> = nodes_p.iter().map(|&v| local_of(v, &mut union_nodes)).collect();
        let map_m: Vec<usize> = nodes_m.iter().map(|&v| local_of(v, &mut union_nodes)).collect();
        let nu = union_nodes.len();

        let table_p = space.table(kp);
        let table_m = space.table(km);
        let mut local = DMatrix::zeros(2 * nu, 2 * nu);
        let mut jump = vec![0.0; nu];
        for j in 1..=k as u32 {
            let weight = gamma[j as usize - 1] * coarse_h.powi(2 * j as i32 - 1) * scale;
            for (q, &wq) in rule.weights.iter().enumerate() {
                let p = rule.points[q];
                jump.iter_mut().for_each(|x| *x = 0.0);
                let (up, vp) = space.local_coords(kp, p);
                let dp = table_p.normal_derivatives(j, face.normal, up, vp, coarse_h);
                for (i, &l) in map_p.iter().enumerate() {
                    jump[l] += dp[i];
                }
                let (um, vm) = space.local_coords(km, p);
                let dm = table_m.normal_derivatives(j, face.normal, um, vm, coarse_h);
                for (i, &l) in map_m.iter().enumerate() {
                    jump[l] -= dm[i];
                }
                for a in 0..nu {
                    if jump[a] == 0.0 {
                        continue;
                    }
                    for b in 0..nu {
                        let val = weight * wq * jump[a] * jump[b];
                        // componentwise jump of the vector field
                        local[(2 * a, 2 * b)] += val;
                        local[(2 * a + 1, 2 * b + 1)] += val;
                    }
                }
            }
        }
        let dofs: Vec<usize> = union_nodes
            .iter()
            .flat_map(|&v| {
                let n = space.node_index[v];
                debug_assert_ne!(n, INVALID);
                [2 * n, 2 * n + 1]
            })
            .collect();
        (dofs, local)
    });
    gather(space.n_dofs(), locals)
}

/// Straight piece of the Dirichlet boundary owned by one active element.
#[derive(Debug, Clone, Copy)]
pub struct DirichletSegment {
    pub element: usize,
    pub a: Point2,
    pub b: Point2,
    /// outward unit normal of the material domain
    pub normal: Vector2<f64>,
}

/// Traction stress sigma(e_c b_i) n at one evaluation of the basis.
#[inline]
fn traction_row(
    mu: f64,
    lambda: f64,
    n: Vector2<f64>,
    grad: Vector2<f64>,
    c: usize,
) -> Vector2<f64> {
    let gn = grad.dot(&n);
    let nc = if c == 0 { n.x } else { n.y };
    let gc = if c == 0 { grad.x } else { grad.y };
    let mut t = mu * nc * grad + lambda * gc * n;
    if c == 0 {
        t.x += mu * gn;
    } else {
        t.y += mu * gn;
    }
    t
}

/// Nitsche terms for weak Dirichlet data `g` on the given segments:
/// consistency, symmetry and the penalty
/// `gamma_d / h (2 mu (u, v) + lambda (u.n, v.n))`.
pub fn assemble_nitsche(
    space: &FESpace,
    material: &ElasticMaterial,
    segments: &[DirichletSegment],
    gamma_d: f64,
    g: &(dyn Fn(Point2) -> Vector2<f64> + Sync),
    par: Parallelism,
) -> (TripletMatrix, Vec<f64>) {
    let (mu, lambda) = (material.mu, material.lambda);
    let h = space.mesh.coarse.h;
    let degree = space.line_degree();
    type Local = (Vec<usize>, DMatrix<f64>, Vec<f64>);
    let locals: Vec<Local> = map_collect(par, segments, |seg| {
        let table = space.table(seg.element);
        let npe = table.n_nodes();
        let mut local = DMatrix::zeros(2 * npe, 2 * npe);
        let mut rhs = vec![0.0; 2 * npe];
        let rule = line_rule(seg.a, seg.b, degree);
        let n = seg.normal;
        for (q, &w) in rule.weights.iter().enumerate() {
            let p = rule.points[q];
            let (u, v) = space.local_coords(seg.element, p);
            let vals = table.values(u, v);
            let (gx, gy) = table.gradients(u, v, h);
            let gval = g(p);
            let gn = gval.dot(&n);
            // tractions sigma(e_c b_i) n for every (basis, component)
            let tractions: Vec<[Vector2<f64>; 2]> = (0..npe)
                .map(|i| {
                    let grad = Vector2::new(gx[i], gy[i]);
                    [
                        traction_row(mu, lambda, n, grad, 0),
                        traction_row(mu, lambda, n, grad, 1),
                    ]
                })
                .collect();
            for i in 0..npe {
                for c in 0..2 {
                    let t_ic = tractions[i][c];
                    let gc = gval[c];
                    let nc = n[c];
                    // rhs: -(g, sigma(v) n) + penalty data terms
                    rhs[2 * i + c] += w
                        * (-t_ic.dot(&gval)
                            + gamma_d / h * (2.0 * mu * gc + lambda * gn * nc) * vals[i]);
                    // row = test dof (i, c), column = trial dof (j, d)
                    for j in 0..npe {
                        for d in 0..2 {
                            let consistency = -tractions[j][d][c] * vals[i];
                            let symmetry = -t_ic[d] * vals[j];
                            let dir = if c == d { 2.0 * mu } else { 0.0 };
                            let penalty =
                                gamma_d / h * (dir + lambda * nc * n[d]) * vals[i] * vals[j];
                            local[(2 * i + c, 2 * j + d)] +=
                                w * (consistency + symmetry + penalty);
                        }
                    }
                }
            }
        }
        (space.element_dofs(seg.element), local, rhs)
    });
    let mut matrix = TripletMatrix::new(space.n_dofs());
    let mut rhs = vec![0.0; space.n_dofs()];
    for (dofs, local, local_rhs) in locals {
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                matrix.push(gi, gj, local[(i, j)]);
            }
            rhs[gi] += local_rhs[i];
        }
    }
    (matrix, rhs)
}

/// Loaded piece of the fixed Neumann boundary owned by one active element.
#[derive(Debug, Clone, Copy)]
pub struct LoadedSegment {
    pub element: usize,
    pub a: Point2,
    pub b: Point2,
    pub traction: Vector2<f64>,
}

/// Surface load vector (g, v) over the loaded segments.
pub fn assemble_load(space: &FESpace, segments: &[LoadedSegment]) -> Vec<f64> {
    let mut rhs = vec![0.0; space.n_dofs()];
    let degree = space.line_degree();
    for seg in segments {
        let table = space.table(seg.element);
        let rule = line_rule(seg.a, seg.b, degree);
        let dofs = space.element_dofs(seg.element);
        for (q, &w) in rule.weights.iter().enumerate() {
            let (u, v) = space.local_coords(seg.element, rule.points[q]);
            let vals = table.values(u, v);
            for i in 0..table.n_nodes() {
                rhs[dofs[2 * i]] += w * seg.traction.x * vals[i];
                rhs[dofs[2 * i + 1]] += w * seg.traction.y * vals[i];
            }
        }
    }
    rhs
}

fn gather(n: usize, locals: Vec<(Vec<usize>, DMatrix<f64>)>) -> TripletMatrix {
    let mut out = TripletMatrix::new(n);
    for (dofs, local) in locals {
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                out.push(gi, gj, local[(i, j)]);
            }
        }
    }
    out
}
