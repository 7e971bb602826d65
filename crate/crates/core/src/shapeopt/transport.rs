//! Level-set transport by Crank-Nicolson time stepping of the stabilized
//! convection equation
//!
//!   (d_t phi, v) + (beta . grad phi, v)
//!     + c2 sum_F h^2 ([[d_n phi]], [[d_n v]])_F = 0
//!
//! on the fine mesh over the whole design domain, with h the fine face
//! length. The face-jump term controls spurious oscillations and vanishes on
//! globally linear fields, so constant-velocity advection of a linear
//! profile is reproduced exactly.

use super::velocity::VelocityField;
use crate::levelset::LevelSetField;
use crate::linsolve::{FactoredMatrix, TripletMatrix};
use crate::shape::{p1_cells, p1_shape_index, ShapeTables};
use crate::{Error, Result};
use nalgebra::Vector2;

/// Substep count satisfying the Courant-style bound
/// `dt max|beta| / h_fine <= 1`.
pub fn cfl_substeps(t_step: f64, max_speed: f64, h_fine: f64) -> usize {
    if max_speed <= 0.0 || t_step <= 0.0 {
        return 1;
    }
    (t_step * max_speed / h_fine).ceil().max(1.0) as usize
}

/// Advects `phi` along `beta` for pseudo-time `t_step` using `substeps`
/// Crank-Nicolson steps.
pub fn transport(
    phi: &LevelSetField,
    beta: &VelocityField,
    t_step: f64,
    c2: f64,
    substeps: usize,
) -> Result<LevelSetField> {
    if t_step <= 0.0 || substeps == 0 {
        return Err(Error::InvalidParameter(format!(
            "transport needs a positive step, got T = {t_step}, substeps = {substeps}"
        )));
    }
    let mesh = phi.mesh.clone();
    let fine = &mesh.fine;
    let n = fine.n_vertices();
    debug_assert!(std::sync::Arc::ptr_eq(&beta.mesh, &mesh));

    // zero velocity advects nothing
    if beta.values.iter().all(|&v| v == 0.0) {
        return Ok(phi.clone());
    }

    let hf = fine.h;
    let data = p1_cells(fine.kind, hf);
    let mut mass = TripletMatrix::new(n);
    let mut convection = TripletMatrix::new(n);
    for f in 0..fine.n_elements() {
        let sd = &data[p1_shape_index(fine, f)];
        let verts = fine.lattice_vertices(f);
        for (i, &vi) in verts.iter().enumerate() {
            for (j, &vj) in verts.iter().enumerate() {
                mass.push(vi, vj, sd.mass[i][j]);
            }
        }
        // (beta . grad phi, v) with beta interpolated at the quadrature points
        for (q, &w) in sd.weights.iter().enumerate() {
            let mut b = Vector2::zeros();
            for (i, &vi) in verts.iter().enumerate() {
                b += sd.values[q][i] * beta.at_vertex(vi);
            }
            for (i, &vi) in verts.iter().enumerate() {
                let row_val = w * sd.values[q][i];
                for (j, &vj) in verts.iter().enumerate() {
                    convection.push(vi, vj, row_val * b.dot(&sd.grads[q][j]));
                }
            }
        }
    }

    // face-jump stabilization over all interior fine faces
    let tables = ShapeTables::new(fine.kind, 1);
    let mut stab = TripletMatrix::new(n);
    let weight = c2 * hf * hf;
    for face in &fine.interior_faces {
        let a = fine.vertices[face.vertices[0]];
        let b = fine.vertices[face.vertices[1]];
        let rule = crate::cutquad::face_rule(a, b, 3);
        let verts_p = fine.lattice_vertices(face.kplus);
        let verts_m = fine.lattice_vertices(face.kminus);
        let table_p = tables.for_element(fine, face.kplus);
        let table_m = tables.for_element(fine, face.kminus);
        let origin_p = fine.element_origin(face.kplus);
        let origin_m = fine.element_origin(face.kminus);
        let mut union: Vec<usize> = verts_p.clone();
        for &v in &verts_m {
            if !union.contains(&v) {
                union.push(v);
            }
        }
        let mut jump = vec![0.0; union.len()];
        for (q, &wq) in rule.weights.iter().enumerate() {
            let p = rule.points[q];
            jump.iter_mut().for_each(|x| *x = 0.0);
            let dp = table_p.normal_derivatives(
                1,
                face.normal,
                (p.x - origin_p.x) / hf,
                (p.y - origin_p.y) / hf,
                hf,
            );
            for (i, &v) in verts_p.iter().enumerate() {
                let l = union.iter().position(|&u| u == v).unwrap();
                jump[l] += dp[i];
            }
            let dm = table_m.normal_derivatives(
                1,
                face.normal,
                (p.x - origin_m.x) / hf,
                (p.y - origin_m.y) / hf,
                hf,
            );
            for (i, &v) in verts_m.iter().enumerate() {
                let l = union.iter().position(|&u| u == v).unwrap();
                jump[l] -= dm[i];
            }
            for (a_loc, &va) in union.iter().enumerate() {
                if jump[a_loc] == 0.0 {
                    continue;
                }
                for (b_loc, &vb) in union.iter().enumerate() {
                    stab.push(va, vb, weight * wq * jump[a_loc] * jump[b_loc]);
                }
            }
        }
    }

    let dt = t_step / substeps as f64;
    // A1 phi^{n+1} = A0 phi^n with A = M +- dt/2 (C + S)
    let mut a1 = mass.clone();
    a1.add_scaled(&convection, 0.5 * dt);
    a1.add_scaled(&stab, 0.5 * dt);
    let mut a0 = mass;
    a0.add_scaled(&convection, -0.5 * dt);
    a0.add_scaled(&stab, -0.5 * dt);
    let a0 = a0.to_csr();
    let factored = FactoredMatrix::new(a1.to_csr())?;

    let mut values = phi.values.clone();
    let mut rhs = vec![0.0; n];
    for _ in 0..substeps {
        a0.matvec(&values, &mut rhs);
        values = factored.solve(&rhs).map_err(Error::Solve)?;
    }
    Ok(LevelSetField::new(mesh, values))
}
