//! Vector finite element space on the active part of the background mesh.
//!
//! Degrees of freedom sit on the Lagrange nodes (fine-mesh vertices) of
//! active elements, two components per node, numbered by ascending fine
//! vertex id so grid ordering keeps the assembled matrices banded.

use crate::geometry::Point2;
use crate::levelset::DomainClassification;
use crate::mesh::{ElementKind, RefinedMesh, INVALID};
use crate::shape::{ShapeTable, ShapeTables};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct FESpace {
    pub mesh: Arc<RefinedMesh>,
    pub k: usize,
    pub active_elements: Vec<usize>,
    pub is_active: Vec<bool>,
    /// fine vertex -> compact node index
    pub node_index: Vec<usize>,
    /// compact node -> fine vertex
    pub node_vertex: Vec<usize>,
    tables: ShapeTables,
}

impl FESpace {
    pub fn new(mesh: Arc<RefinedMesh>, classification: &DomainClassification) -> Self {
        let k = mesh.k;
        let n_fine_v = mesh.fine.n_vertices();
        let mut node_index = vec![INVALID; n_fine_v];
        let mut node_vertex = Vec::new();
        let mut used = vec![false; n_fine_v];
        for &e in &classification.active_elements {
            for &v in mesh.nodes(e) {
                used[v] = true;
            }
        }
        for v in 0..n_fine_v {
            if used[v] {
                node_index[v] = node_vertex.len();
                node_vertex.push(v);
            }
        }
        let tables = ShapeTables::new(mesh.coarse.kind, k);
        FESpace {
            k,
            active_elements: classification.active_elements.clone(),
            is_active: classification.is_active.clone(),
            node_index,
            node_vertex,
            tables,
            mesh,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.node_vertex.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.node_vertex.len()
    }

    /// Interleaved dof ids of element `e`: x then y component per node.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let mut dofs = Vec::with_capacity(2 * self.mesh.nodes_per_element);
        for &v in self.mesh.nodes(e) {
            let n = self.node_index[v];
            debug_assert_ne!(n, INVALID, "element {e} is not active");
            dofs.push(2 * n);
            dofs.push(2 * n + 1);
        }
        dofs
    }

    pub fn table(&self, e: usize) -> &ShapeTable {
        self.tables.for_element(&self.mesh.coarse, e)
    }

    /// Local unit-cell coordinates of physical point `p` in element `e`.
    pub fn local_coords(&self, e: usize, p: Point2) -> (f64, f64) {
        let origin = self.mesh.coarse.element_origin(e);
        let h = self.mesh.coarse.h;
        ((p.x - origin.x) / h, (p.y - origin.y) / h)
    }

    /// Integration degree making products of basis gradients exact: tensor
    /// product bases need 4k total degree, triangles 2k.
    pub fn bulk_degree(&self) -> i32 {
        match self.mesh.coarse.kind {
            ElementKind::Quadrilateral => 4 * self.k as i32,
            ElementKind::Triangle => 2 * self.k as i32,
        }
    }

    pub fn line_degree(&self) -> i32 {
        match self.mesh.coarse.kind {
            ElementKind::Quadrilateral => (2 * self.k + 1) as i32,
            ElementKind::Triangle => (2 * self.k + 1) as i32,
        }
    }
}
