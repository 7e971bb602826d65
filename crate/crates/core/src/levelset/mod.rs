//! Level-set representation of the material domain and its classification
//! against the background mesh.
//!
//! The level-set is piecewise (bi)linear on the refined mesh; the material
//! domain is where it is positive. Classification derives, per coarse
//! element, an inside/cut/outside status from the signs at its fine-vertex
//! Lagrange nodes, the active element set that carries dofs, and the face
//! sets used by the ghost-penalty stabilization.

mod extract;
mod reinit;

pub use extract::{extract_geometry, CellCut, CutGeometry};
pub use reinit::{reinitialize, reinitialize_with_report, ReinitReport};

use crate::geometry::{Point2, Segment};
use crate::mesh::RefinedMesh;
use crate::parallel::{map_range, Parallelism};
use crate::{Error, Result};
use nalgebra::Vector2;
use std::sync::Arc;

/// Nodal level-set values on the fine mesh; material is where `phi > 0`.
#[derive(Debug, Clone)]
pub struct LevelSetField {
    pub mesh: Arc<RefinedMesh>,
    pub values: Vec<f64>,
}

impl LevelSetField {
    pub fn new(mesh: Arc<RefinedMesh>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.fine.n_vertices());
        let mut field = LevelSetField { mesh, values };
        field.snap_zeros();
        field
    }

    pub fn from_fn(mesh: &Arc<RefinedMesh>, f: impl Fn(Point2) -> f64) -> Self {
        let values = mesh.fine.vertices.iter().map(|&p| f(p)).collect();
        Self::new(mesh.clone(), values)
    }

    /// Rounds values below the noise floor to exactly zero. Geometries that
    /// touch grid lines produce vertex values at the last-bit scale whose
    /// signs are rounding artifacts; all the classification and extraction
    /// conventions handle exact zeros deterministically.
    fn snap_zeros(&mut self) {
        let eps = 1e-12 * self.mesh.fine.h;
        for v in &mut self.values {
            if v.abs() < eps {
                *v = 0.0;
            }
        }
    }

    /// Values at the vertices of fine element `f`.
    pub fn cell_values(&self, f: usize) -> Vec<f64> {
        self.mesh
            .fine
            .element_vertices(f)
            .iter()
            .map(|&v| self.values[v])
            .collect()
    }

    /// Interpolated value at a point (bilinear on quads, linear on triangles).
    pub fn eval(&self, p: Point2) -> f64 {
        let fine = &self.mesh.fine;
        let f = match fine.locate(p) {
            Some(f) => f,
            None => return f64::NEG_INFINITY,
        };
        let origin = fine.element_origin(f);
        let u = (p.x - origin.x) / fine.h;
        let v = (p.y - origin.y) / fine.h;
        let vals = self.cell_values(f);
        match fine.kind {
            crate::mesh::ElementKind::Quadrilateral => {
                vals[0] * (1.0 - u) * (1.0 - v)
                    + vals[1] * u * (1.0 - v)
                    + vals[2] * u * v
                    + vals[3] * (1.0 - u) * v
            }
            crate::mesh::ElementKind::Triangle => {
                if fine.is_lower_triangle(f) {
                    vals[0] * (1.0 - u) + vals[1] * (u - v) + vals[2] * v
                } else {
                    vals[0] * (1.0 - v) + vals[1] * u + vals[2] * (v - u)
                }
            }
        }
    }
}

/// Circular hole of the initial design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hole {
    pub center: Point2,
    pub radius: f64,
}

/// Initial level-set: signed distance to the hole union, positive in
/// material, clipped at the domain diameter.
pub fn init_levelset(mesh: &Arc<RefinedMesh>, holes: &[Hole]) -> LevelSetField {
    let clip = mesh.coarse.domain.diameter();
    LevelSetField::from_fn(mesh, |p| {
        let mut phi = clip;
        for hole in holes {
            phi = phi.min((p - hole.center).norm() - hole.radius);
        }
        phi.clamp(-clip, clip)
    })
}

/// Traction applied on a fixed portion of the outer boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSegment {
    pub segment: Segment,
    pub traction: Vector2<f64>,
}

/// Designated boundary portions on the outer boundary of the design domain.
/// Everything else, including the evolving cut boundary, is traction-free
/// Neumann boundary.
#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    pub dirichlet: Vec<Segment>,
    pub loads: Vec<LoadSegment>,
}

impl BoundarySpec {
    pub fn on_dirichlet(&self, p: Point2, tol: f64) -> bool {
        self.dirichlet.iter().any(|s| s.contains(p, tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementStatus {
    Inside,
    Cut,
    Outside,
}

/// Status of an element from the level-set values at its fine nodes.
/// A vertex value of exactly zero counts as material.
fn status_from_values(values: impl Iterator<Item = f64>) -> ElementStatus {
    let mut has_pos = false;
    let mut has_neg = false;
    for v in values {
        if v > 0.0 {
            has_pos = true;
        } else if v < 0.0 {
            has_neg = true;
        }
    }
    match (has_pos, has_neg) {
        (true, true) => ElementStatus::Cut,
        (true, false) => ElementStatus::Inside,
        _ => ElementStatus::Outside,
    }
}

/// Active mesh, element statuses and stabilized face sets for a level-set.
#[derive(Debug, Clone)]
pub struct DomainClassification {
    /// per coarse element
    pub status: Vec<ElementStatus>,
    /// per fine element
    pub fine_status: Vec<ElementStatus>,
    /// coarse elements carrying dofs (inside or cut), ascending
    pub active_elements: Vec<usize>,
    pub is_active: Vec<bool>,
    /// interior coarse faces meeting the material domain
    pub fh_faces: Vec<usize>,
    /// faces of `fh_faces` touching elements cut/touched by the Dirichlet boundary
    pub fhd_faces: Vec<usize>,
    /// faces touching elements at the Neumann boundary, minus `fhd_faces`
    pub fhn_faces: Vec<usize>,
    /// coarse elements whose closure meets the Dirichlet boundary
    pub omega_hd: Vec<bool>,
    /// coarse elements whose closure meets the Neumann boundary
    pub omega_hn: Vec<bool>,
}

/// Classifies elements and builds the stabilization face sets.
///
/// An element is active when its closure meets the material domain, i.e.
/// some fine node is strictly positive. The Dirichlet/Neumann element
/// neighborhoods collect active elements whose closure touches the
/// respective boundary part; the face sets are the active faces touching
/// those neighborhoods, with Dirichlet taking precedence so the two sets
/// stay disjoint.
pub fn classify(
    phi: &LevelSetField,
    boundary: &BoundarySpec,
    par: Parallelism,
) -> Result<DomainClassification> {
    let refined = &phi.mesh;
    let coarse = &refined.coarse;
    let fine = &refined.fine;
    let tol = 1e-9 * coarse.h;

    // per fine vertex: on a Dirichlet segment / on the outer boundary
    let n_fine_v = fine.n_vertices();
    let mut on_gamma_d = vec![false; n_fine_v];
    let mut on_outer = vec![false; n_fine_v];
    for bf in &fine.boundary_faces {
        for &v in &bf.vertices {
            on_outer[v] = true;
        }
    }
    for v in 0..n_fine_v {
        if on_outer[v] && boundary.on_dirichlet(fine.vertices[v], tol) {
            on_gamma_d[v] = true;
        }
    }

    let fine_status: Vec<ElementStatus> = map_range(par, fine.n_elements(), |f| {
        status_from_values(
            fine.element_vertices(f)
                .iter()
                .map(|&v| phi.values[v]),
        )
    });

    struct ElemInfo {
        status: ElementStatus,
        touches_d: bool,
        touches_n: bool,
    }
    let infos: Vec<ElemInfo> = map_range(par, coarse.n_elements(), |e| {
        let nodes = refined.nodes(e);
        let status = status_from_values(nodes.iter().map(|&v| phi.values[v]));
        if status == ElementStatus::Outside {
            return ElemInfo { status, touches_d: false, touches_n: false };
        }
        let mut min = f64::INFINITY;
        for &v in nodes {
            min = min.min(phi.values[v]);
        }
        // closure meets the zero set
        let touches_zero = min <= 0.0;
        let mut touches_d = false;
        let mut touches_n = touches_zero;
        for &v in nodes {
            if phi.values[v] >= 0.0 {
                if on_gamma_d[v] {
                    touches_d = true;
                } else if on_outer[v] {
                    touches_n = true;
                }
            }
        }
        ElemInfo { status, touches_d, touches_n }
    });

    let status: Vec<ElementStatus> = infos.iter().map(|i| i.status).collect();
    let is_active: Vec<bool> = status
        .iter()
        .map(|&s| s != ElementStatus::Outside)
        .collect();
    let active_elements: Vec<usize> = (0..coarse.n_elements()).filter(|&e| is_active[e]).collect();
    if active_elements.is_empty() {
        return Err(Error::DegenerateDomain(""));
    }
    let omega_hd: Vec<bool> = infos.iter().map(|i| i.touches_d).collect();
    let omega_hn: Vec<bool> = infos.iter().map(|i| i.touches_n).collect();

    // coarse vertices touching the D/N element neighborhoods
    let n_coarse_v = coarse.n_vertices();
    let mut vertex_touches_d = vec![false; n_coarse_v];
    let mut vertex_touches_n = vec![false; n_coarse_v];
    for e in 0..coarse.n_elements() {
        if omega_hd[e] || omega_hn[e] {
            for &v in coarse.element_vertices(e) {
                if omega_hd[e] {
                    vertex_touches_d[v] = true;
                }
                if omega_hn[e] {
                    vertex_touches_n[v] = true;
                }
            }
        }
    }

    // fine vertices along each coarse face decide membership in F_h
    let k = refined.k;
    let hf = fine.h;
    let mut fh_faces = Vec::new();
    let mut fhd_faces = Vec::new();
    let mut fhn_faces = Vec::new();
    for (id, face) in coarse.interior_faces.iter().enumerate() {
        let a = coarse.vertices[face.vertices[0]];
        let b = coarse.vertices[face.vertices[1]];
        let mut meets_material = false;
        for step in 0..=k {
            let p = a + (step as f64 / k as f64) * (b - a);
            let gi = (p.x / hf).round() as usize;
            let gj = (p.y / hf).round() as usize;
            if let Some(v) = fine.vertex_at_grid(gi, gj) {
                if phi.values[v] > 0.0 {
                    meets_material = true;
                    break;
                }
            }
        }
        if !meets_material {
            continue;
        }
        fh_faces.push(id);
        let touches_d =
            vertex_touches_d[face.vertices[0]] || vertex_touches_d[face.vertices[1]];
        let touches_n =
            vertex_touches_n[face.vertices[0]] || vertex_touches_n[face.vertices[1]];
        if touches_d {
            fhd_faces.push(id);
        } else if touches_n {
            fhn_faces.push(id);
        }
    }

    Ok(DomainClassification {
        status,
        fine_status,
        active_elements,
        is_active,
        fh_faces,
        fhd_faces,
        fhn_faces,
        omega_hd,
        omega_hn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_background_mesh, refine_uniform, DesignDomain, ElementKind};

    fn refined_unit_square(h: f64, k: usize, kind: ElementKind) -> Arc<RefinedMesh> {
        let m = build_background_mesh(&DesignDomain::rectangle(1.0, 1.0), h, kind).unwrap();
        refine_uniform(m, k).unwrap()
    }

    fn count(status: &[ElementStatus], s: ElementStatus) -> usize {
        status.iter().filter(|&&x| x == s).count()
    }

    #[test]
    fn constant_positive_is_all_inside() {
        let mesh = refined_unit_square(0.25, 1, ElementKind::Quadrilateral);
        let phi = LevelSetField::from_fn(&mesh, |_| 1.0);
        let class = classify(&phi, &BoundarySpec::default(), Parallelism::Sequential).unwrap();
        assert_eq!(count(&class.status, ElementStatus::Inside), 16);
        assert_eq!(class.active_elements.len(), 16);
        assert_eq!(class.fh_faces.len(), mesh.coarse.interior_faces.len());
        // no Dirichlet boundary designated; the whole outer boundary is
        // Neumann, so its element layer is stabilized
        assert!(class.fhd_faces.is_empty());
        assert!(!class.fhn_faces.is_empty());
        for e in 0..mesh.coarse.n_elements() {
            let (i, j) = mesh.coarse.element_grid_cell(e);
            let on_rim = i == 0 || j == 0 || i == 3 || j == 3;
            assert_eq!(class.omega_hn[e], on_rim);
        }
    }

    #[test]
    fn interior_disk_keeps_far_faces_inactive() {
        // material only inside a central disk: faces far outside carry no
        // material and stay out of the active face set
        let mesh = refined_unit_square(0.125, 1, ElementKind::Quadrilateral);
        let phi = LevelSetField::from_fn(&mesh, |p| {
            0.2 - (p - Point2::new(0.5, 0.5)).norm()
        });
        let class = classify(&phi, &BoundarySpec::default(), Parallelism::Sequential).unwrap();
        assert!(count(&class.status, ElementStatus::Outside) > 0);
        let coarse = &mesh.coarse;
        for &f in &class.fh_faces {
            let face = &coarse.interior_faces[f];
            let mid = 0.5 * (coarse.vertices[face.vertices[0]] + coarse.vertices[face.vertices[1]]);
            assert!(
                (mid - Point2::new(0.5, 0.5)).norm() < 0.2 + 2.0 * coarse.h,
                "active face far from material"
            );
        }
        // the disk never reaches the outer boundary: Neumann neighborhood is
        // exactly the zero-set touched elements
        for e in 0..coarse.n_elements() {
            assert_eq!(
                class.omega_hn[e],
                class.is_active[e] && class.status[e] == ElementStatus::Cut
            );
        }
    }

    #[test]
    fn plane_cut_through_cell_interiors() {
        // zero line at x = 0.47 crosses the second column of a 4x4 grid:
        // hand enumeration gives 4 outside, 4 cut, 8 inside
        let mesh = refined_unit_square(0.25, 1, ElementKind::Quadrilateral);
        let phi = LevelSetField::from_fn(&mesh, |p| p.x - 0.47);
        let class = classify(&phi, &BoundarySpec::default(), Parallelism::Sequential).unwrap();
        assert_eq!(count(&class.status, ElementStatus::Outside), 4);
        assert_eq!(count(&class.status, ElementStatus::Cut), 4);
        assert_eq!(count(&class.status, ElementStatus::Inside), 8);
    }

    #[test]
    fn plane_cut_on_grid_line_leaves_no_cut_elements() {
        // zero line exactly on x = 0.5: the left elements have no material
        // (phi <= 0 throughout), the right half is material whose closure
        // touches the zero set, so the active mesh is exactly the right half.
        let mesh = refined_unit_square(0.25, 1, ElementKind::Quadrilateral);
        let phi = LevelSetField::from_fn(&mesh, |p| p.x - 0.5);
        let class = classify(&phi, &BoundarySpec::default(), Parallelism::Sequential).unwrap();
        assert_eq!(count(&class.status, ElementStatus::Outside), 8);
        assert_eq!(count(&class.status, ElementStatus::Cut), 0);
        assert_eq!(count(&class.status, ElementStatus::Inside), 8);
        // the touched column is in the Neumann neighborhood
        let coarse = &mesh.coarse;
        for e in 0..coarse.n_elements() {
            let (i, _) = coarse.element_grid_cell(e);
            if i == 2 {
                assert!(class.omega_hn[e]);
            }
        }
        // faces on the zero line carry no material and are not active
        for &f in &class.fh_faces {
            let face = &coarse.interior_faces[f];
            let a = coarse.vertices[face.vertices[0]];
            let b = coarse.vertices[face.vertices[1]];
            assert!(
                !(a.x == 0.5 && b.x == 0.5),
                "face on the zero line must not be active"
            );
        }
    }

    #[test]
    fn classification_is_scale_invariant() {
        use rand::{Rng, SeedableRng};
        let mesh = refined_unit_square(0.25, 2, ElementKind::Triangle);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let values: Vec<f64> = (0..mesh.fine.n_vertices())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let phi = LevelSetField::new(mesh.clone(), values.clone());
        let phi2 = LevelSetField::new(mesh, values.iter().map(|v| 2.0 * v).collect());
        let spec = BoundarySpec::default();
        let c1 = classify(&phi, &spec, Parallelism::Sequential).unwrap();
        let c2 = classify(&phi2, &spec, Parallelism::Sequential).unwrap();
        assert_eq!(c1.status, c2.status);
        assert_eq!(c1.fh_faces, c2.fh_faces);
    }

    #[test]
    fn dirichlet_faces_never_in_neumann_set() {
        let mesh = refined_unit_square(0.25, 1, ElementKind::Quadrilateral);
        // material everywhere, hole near the left boundary so cut elements
        // touch the Dirichlet edge
        let phi = LevelSetField::from_fn(&mesh, |p| {
            (p - Point2::new(0.1, 0.5)).norm() - 0.22
        });
        let spec = BoundarySpec {
            dirichlet: vec![Segment::new(0.0, 0.0, 0.0, 1.0)],
            loads: vec![],
        };
        let class = classify(&phi, &spec, Parallelism::Sequential).unwrap();
        assert!(!class.fhd_faces.is_empty());
        for f in &class.fhd_faces {
            assert!(!class.fhn_faces.contains(f));
        }
        // a face between a Dirichlet-cut element and its neighbor is in fhd
        let e_cut = (0..mesh.coarse.n_elements())
            .find(|&e| class.omega_hd[e] && class.status[e] == ElementStatus::Cut)
            .expect("a cut element touches the Dirichlet edge");
        let shared: Vec<usize> = mesh
            .coarse
            .interior_faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.kplus == e_cut || f.kminus == e_cut)
            .map(|(id, _)| id)
            .collect();
        for id in shared {
            if class.fh_faces.contains(&id) {
                assert!(class.fhd_faces.contains(&id));
            }
        }
    }

    #[test]
    fn empty_domain_is_degenerate() {
        let mesh = refined_unit_square(0.5, 1, ElementKind::Quadrilateral);
        let phi = LevelSetField::from_fn(&mesh, |_| -1.0);
        assert!(matches!(
            classify(&phi, &BoundarySpec::default(), Parallelism::Sequential),
            Err(Error::DegenerateDomain(_))
        ));
    }

    #[test]
    fn initial_design_values() {
        let mesh = refined_unit_square(0.25, 2, ElementKind::Quadrilateral);
        // no holes: positive everywhere
        let full = init_levelset(&mesh, &[]);
        assert!(full.values.iter().all(|&v| v > 0.0));
        // single hole: signed distance to the circle
        let hole = Hole { center: Point2::new(0.5, 0.5), radius: 0.2 };
        let one = init_levelset(&mesh, &[hole]);
        for (v, &p) in one.values.iter().zip(mesh.fine.vertices.iter()) {
            let expected = (p - hole.center).norm() - 0.2;
            assert!((v - expected).abs() < 1e-12);
        }
        // two overlapping holes: min of the two distances (point-sampling oracle)
        let h2 = Hole { center: Point2::new(0.625, 0.5), radius: 0.2 };
        let two = init_levelset(&mesh, &[hole, h2]);
        for (v, &p) in two.values.iter().zip(mesh.fine.vertices.iter()) {
            let expected =
                ((p - hole.center).norm() - 0.2).min((p - h2.center).norm() - 0.2);
            assert!((v - expected).abs() < 1e-12);
        }
    }
}
