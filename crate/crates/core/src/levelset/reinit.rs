//! Two-step reinitialization of the level-set toward a signed distance
//! function, keeping the inside-positive sign convention.
//!
//! Step 1 replaces the values on the band of fine elements touching the zero
//! set by the L2 projection of `phi / |grad phi|`, the first-order distance
//! predictor that leaves the zero set in place. Step 2 freezes the band and
//! drives `|grad phi| -> 1` elsewhere by the fixed-point iteration on the
//! energy `1/2 || 1 - |grad phi| ||^2`, each pass a Laplace solve with the
//! previous normalized gradient as source.

use super::LevelSetField;
use crate::linsolve::{FactoredMatrix, TripletMatrix};
use crate::mesh::INVALID;
use crate::shape::{p1_cells, p1_shape_index};
use crate::{Error, Result};
use nalgebra::Vector2;

const GRAD_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default)]
pub struct ReinitReport {
    pub step2_iterations: usize,
    pub max_update: f64,
    /// elements where |grad phi| fell below the clamp in step 1
    pub clamped_cells: usize,
}

/// Reinitializes `phi`; see [`reinitialize_with_report`].
pub fn reinitialize(phi: &LevelSetField, max_iters: usize, tol: f64) -> Result<LevelSetField> {
    reinitialize_with_report(phi, max_iters, tol).map(|(field, _)| field)
}

/// Reinitializes `phi` toward a signed distance function and reports the
/// fixed-point iteration behavior. A field without a sign change is
/// returned unchanged.
pub fn reinitialize_with_report(
    phi: &LevelSetField,
    max_iters: usize,
    tol: f64,
) -> Result<(LevelSetField, ReinitReport)> {
    let mesh = phi.mesh.clone();
    let fine = &mesh.fine;
    let hf = fine.h;
    let n_v = fine.n_vertices();
    let mut report = ReinitReport::default();

    let has_pos = phi.values.iter().any(|&v| v > 0.0);
    let has_neg = phi.values.iter().any(|&v| v < 0.0);
    if !has_pos || !has_neg {
        return Ok((phi.clone(), report));
    }

    let data = p1_cells(fine.kind, hf);

    // band of elements touched by the zero set
    let mut band_cells = Vec::new();
    for f in 0..fine.n_elements() {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in fine.element_vertices(f) {
            min = min.min(phi.values[v]);
            max = max.max(phi.values[v]);
        }
        if min <= 0.0 && max >= 0.0 {
            band_cells.push(f);
        }
    }
    debug_assert!(!band_cells.is_empty());

    // step 1: L2 projection of phi / |grad phi| on the band
    let mut band_index = vec![INVALID; n_v];
    let mut band_vertices = Vec::new();
    for &f in &band_cells {
        for &v in fine.element_vertices(f) {
            if band_index[v] == INVALID {
                band_index[v] = band_vertices.len();
                band_vertices.push(v);
            }
        }
    }
    let nb = band_vertices.len();
    let mut mass = TripletMatrix::new(nb);
    let mut rhs = vec![0.0; nb];
    for &f in &band_cells {
        let sd = &data[p1_shape_index(fine, f)];
        let verts = fine.lattice_vertices(f);
        let vals: Vec<f64> = verts.iter().map(|&v| phi.values[v]).collect();
        // per-element |grad phi|: averaged over the quadrature points
        // (constant on triangles)
        let mut norm = 0.0;
        let mut wsum = 0.0;
        for (q, &w) in sd.weights.iter().enumerate() {
            let mut g = Vector2::zeros();
            for (i, &vi) in vals.iter().enumerate() {
                g += vi * sd.grads[q][i];
            }
            norm += w * g.norm();
            wsum += w;
        }
        let mut s = norm / wsum;
        if s < GRAD_CLAMP {
            s = GRAD_CLAMP;
            report.clamped_cells += 1;
        }
        for (i, &vi_glob) in verts.iter().enumerate() {
            let bi = band_index[vi_glob];
            for (j, &vj_glob) in verts.iter().enumerate() {
                mass.push(bi, band_index[vj_glob], sd.mass[i][j]);
                let _ = vj_glob;
            }
            let mut r = 0.0;
            for (j, &vj) in vals.iter().enumerate() {
                r += sd.mass[i][j] * vj;
            }
            rhs[bi] += r / s;
        }
    }
    if report.clamped_cells > 0 {
        eprintln!(
            "reinitialize: |grad phi| clamped to {GRAD_CLAMP:.0e} on {} cut element(s)",
            report.clamped_cells
        );
    }
    let projected = FactoredMatrix::new(mass.to_csr())?.solve(&rhs).map_err(Error::Solve)?;
    let mut values = phi.values.clone();
    for (bi, &v) in band_vertices.iter().enumerate() {
        values[v] = projected[bi];
    }

    // step 2: fixed-point Laplace iterations with the band frozen
    let frozen: Vec<bool> = (0..n_v).map(|v| band_index[v] != INVALID).collect();
    let mut stiffness = TripletMatrix::new(n_v);
    let mut dirichlet = TripletMatrix::new(n_v);
    for f in 0..fine.n_elements() {
        let sd = &data[p1_shape_index(fine, f)];
        let verts = fine.lattice_vertices(f);
        for (i, &vi) in verts.iter().enumerate() {
            for (j, &vj) in verts.iter().enumerate() {
                stiffness.push(vi, vj, sd.stiffness[i][j]);
                if !frozen[vi] && !frozen[vj] {
                    dirichlet.push(vi, vj, sd.stiffness[i][j]);
                }
            }
        }
    }
    for v in 0..n_v {
        if frozen[v] {
            dirichlet.push(v, v, 1.0);
        }
    }
    let k_orig = stiffness.to_csr();
    let factored = FactoredMatrix::new(dirichlet.to_csr())?;

    // coupling of the frozen values into the free equations
    let g_ext: Vec<f64> = (0..n_v).map(|v| if frozen[v] { values[v] } else { 0.0 }).collect();
    let mut coupling = vec![0.0; n_v];
    k_orig.matvec(&g_ext, &mut coupling);

    for it in 0..max_iters {
        let mut rhs = vec![0.0; n_v];
        for f in 0..fine.n_elements() {
            let sd = &data[p1_shape_index(fine, f)];
            let verts = fine.lattice_vertices(f);
            let vals: Vec<f64> = verts.iter().map(|&v| values[v]).collect();
            for (q, &w) in sd.weights.iter().enumerate() {
                let mut g = Vector2::zeros();
                for (i, &vi) in vals.iter().enumerate() {
                    g += vi * sd.grads[q][i];
                }
                let dir = g / g.norm().max(GRAD_CLAMP);
                for (i, &vi_glob) in verts.iter().enumerate() {
                    if !frozen[vi_glob] {
                        rhs[vi_glob] += w * dir.dot(&sd.grads[q][i]);
                    }
                }
            }
        }
        for v in 0..n_v {
            if frozen[v] {
                rhs[v] = values[v];
            } else {
                rhs[v] -= coupling[v];
            }
        }
        let next = factored.solve(&rhs).map_err(Error::Solve)?;
        let mut max_update = 0.0f64;
        for v in 0..n_v {
            if !frozen[v] {
                max_update = max_update.max((next[v] - values[v]).abs());
                values[v] = next[v];
            }
        }
        report.step2_iterations = it + 1;
        report.max_update = max_update;
        if max_update < tol * hf {
            break;
        }
    }

    Ok((LevelSetField::new(mesh, values), report))
}
