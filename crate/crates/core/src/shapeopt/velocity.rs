//! Regularized steepest-descent velocity.
//!
//! The velocity solves b(beta', theta) = -dJ(theta) over the vector P1 space
//! on the whole design domain, with b = (., .) + c1 (grad ., grad .) setting
//! the regularity, the normal component pinned to zero on the outer boundary
//! (both components at corners) and the tangential condition natural. The
//! returned field is normalized to b(beta, beta) = 1, making the step size
//! of the transport the only scale.

use super::derivative::ShapeDerivative;
use crate::linsolve::{FactoredMatrix, TripletMatrix};
use crate::mesh::RefinedMesh;
use crate::shape::{p1_cells, p1_shape_index};
use crate::{Error, Result};
use nalgebra::Vector2;
use std::sync::Arc;

const STATIONARY_TOL: f64 = 1e-20;

/// Normalized descent velocity on the fine mesh.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub mesh: Arc<RefinedMesh>,
    /// interleaved nodal components, b-normalized
    pub values: Vec<f64>,
    /// b(beta', beta') of the unnormalized solve
    pub raw_norm_sq: f64,
}

impl VelocityField {
    pub fn at_vertex(&self, v: usize) -> Vector2<f64> {
        Vector2::new(self.values[2 * v], self.values[2 * v + 1])
    }

    /// Largest pointwise speed, the scale entering the transport CFL bound.
    pub fn max_speed(&self) -> f64 {
        (0..self.mesh.fine.n_vertices())
            .map(|v| self.at_vertex(v).norm())
            .fold(0.0, f64::max)
    }
}

/// Scalar regularization matrix M + c1 K on the fine mesh.
fn regularization_matrix(mesh: &RefinedMesh, c1: f64) -> TripletMatrix {
    let fine = &mesh.fine;
    let data = p1_cells(fine.kind, fine.h);
    let mut s = TripletMatrix::new(fine.n_vertices());
    for f in 0..fine.n_elements() {
        let sd = &data[p1_shape_index(fine, f)];
        let verts = fine.lattice_vertices(f);
        for (i, &vi) in verts.iter().enumerate() {
            for (j, &vj) in verts.iter().enumerate() {
                s.push(vi, vj, sd.mass[i][j] + c1 * sd.stiffness[i][j]);
            }
        }
    }
    s
}

/// Per-vertex constraints on the outer boundary: the normal component of
/// the velocity vanishes; corners pin both components.
fn boundary_constraints(mesh: &RefinedMesh) -> (Vec<bool>, Vec<bool>) {
    let fine = &mesh.fine;
    let mut fix_x = vec![false; fine.n_vertices()];
    let mut fix_y = vec![false; fine.n_vertices()];
    for bf in &fine.boundary_faces {
        for &v in &bf.vertices {
            if bf.normal.x.abs() > 0.5 {
                fix_x[v] = true;
            } else {
                fix_y[v] = true;
            }
        }
    }
    (fix_x, fix_y)
}

/// Solves for the b-normalized descent velocity. Returns `None` at a
/// stationary point (vanishing b-norm) instead of dividing by zero.
pub fn velocity(
    dj: &ShapeDerivative,
    c1: f64,
    mesh: &Arc<RefinedMesh>,
) -> Result<Option<VelocityField>> {
    if c1 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "velocity regularization c1 must be positive, got {c1}"
        )));
    }
    let fine = &mesh.fine;
    let n = fine.n_vertices();
    let s_plain = regularization_matrix(mesh, c1).to_csr();
    let (fix_x, fix_y) = boundary_constraints(mesh);

    let mut beta_prime = vec![0.0; 2 * n];
    for (comp, fixed) in [(0usize, &fix_x), (1usize, &fix_y)] {
        let mut sys = TripletMatrix::new(n);
        for i in 0..n {
            for k in s_plain.row_ptr[i]..s_plain.row_ptr[i + 1] {
                let j = s_plain.cols[k];
                if !fixed[i] && !fixed[j] {
                    sys.push(i, j, s_plain.vals[k]);
                }
            }
        }
        for i in 0..n {
            if fixed[i] {
                sys.push(i, i, 1.0);
            }
        }
        let rhs: Vec<f64> = (0..n)
            .map(|i| if fixed[i] { 0.0 } else { -dj.values[2 * i + comp] })
            .collect();
        let sol = FactoredMatrix::new(sys.to_csr())?.solve(&rhs).map_err(Error::Solve)?;
        for i in 0..n {
            beta_prime[2 * i + comp] = sol[i];
        }
    }

    // b(beta', beta') through the plain bilinear form, per component
    let mut norm_sq = 0.0;
    let mut y = vec![0.0; n];
    for comp in 0..2 {
        let x: Vec<f64> = (0..n).map(|i| beta_prime[2 * i + comp]).collect();
        s_plain.matvec(&x, &mut y);
        norm_sq += x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    }
    if norm_sq < STATIONARY_TOL {
        return Ok(None);
    }
    let scale = norm_sq.sqrt().recip();
    for v in &mut beta_prime {
        *v *= scale;
    }
    Ok(Some(VelocityField { mesh: mesh.clone(), values: beta_prime, raw_norm_sq: norm_sq }))
}
