//! Removal of material components that are disconnected from the Dirichlet
//! boundary.
//!
//! Material fine cells (any strictly positive vertex) are joined across
//! shared faces with material on both sides; components whose closure never
//! reaches a Dirichlet segment would float without support and make the
//! stiffness matrix singular, so their level-set values are flipped
//! negative. Values on vertices shared with kept components are left alone.

use crate::levelset::{BoundarySpec, LevelSetField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct FilterReport {
    /// material components before filtering
    pub components_before: usize,
    pub components_kept: usize,
    /// void components fully enclosed by material (holes of the domain)
    pub holes: usize,
    pub removed_cells: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut walk = i;
        while self.parent[walk] != root {
            let next = self.parent[walk];
            self.parent[walk] = root;
            walk = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Filters out material disconnected from the Dirichlet boundary. With no
/// Dirichlet segments designated the field passes through unchanged (only
/// the component statistics are computed).
pub fn filter_disconnected(
    phi: &LevelSetField,
    boundary: &BoundarySpec,
) -> Result<(LevelSetField, FilterReport)> {
    let mesh = &phi.mesh;
    let fine = &mesh.fine;
    let n_cells = fine.n_elements();
    let tol = 1e-9 * mesh.coarse.h;

    let material: Vec<bool> = (0..n_cells)
        .map(|f| fine.element_vertices(f).iter().any(|&v| phi.values[v] > 0.0))
        .collect();

    // cells count as connected only when their shared face carries material
    // of positive measure; a face touched at a single point transmits no
    // stiffness and would leave a mechanism behind
    let face_material_fraction = |a: f64, b: f64| -> f64 {
        match (a > 0.0, b > 0.0) {
            (true, true) => 1.0,
            (true, false) => a / (a - b),
            (false, true) => b / (b - a),
            (false, false) => 0.0,
        }
    };
    let mut uf = UnionFind::new(n_cells);
    for face in &fine.interior_faces {
        if material[face.kplus] && material[face.kminus] {
            let fa = phi.values[face.vertices[0]];
            let fb = phi.values[face.vertices[1]];
            if face_material_fraction(fa, fb) > 1e-12 {
                uf.union(face.kplus, face.kminus);
            }
        }
    }

    // vertices on the outer boundary / on the Dirichlet segments
    let mut on_outer = vec![false; fine.n_vertices()];
    for bf in &fine.boundary_faces {
        for &v in &bf.vertices {
            on_outer[v] = true;
        }
    }
    let on_dirichlet: Vec<bool> = (0..fine.n_vertices())
        .map(|v| on_outer[v] && boundary.on_dirichlet(fine.vertices[v], tol))
        .collect();

    // component bookkeeping
    let mut roots: Vec<usize> = Vec::new();
    let mut root_of = vec![usize::MAX; n_cells];
    let mut touches: Vec<bool> = Vec::new();
    for f in 0..n_cells {
        if !material[f] {
            continue;
        }
        let r = uf.find(f);
        let idx = match roots.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                roots.push(r);
                touches.push(false);
                roots.len() - 1
            }
        };
        root_of[f] = idx;
        if fine
            .element_vertices(f)
            .iter()
            .any(|&v| on_dirichlet[v] && phi.values[v] >= 0.0)
        {
            touches[idx] = true;
        }
    }
    let components_before = roots.len();

    // holes: void components with no outer-boundary contact
    let mut void_uf = UnionFind::new(n_cells);
    for face in &fine.interior_faces {
        if !material[face.kplus] && !material[face.kminus] {
            void_uf.union(face.kplus, face.kminus);
        }
    }
    let mut void_roots: Vec<usize> = Vec::new();
    let mut void_open: Vec<bool> = Vec::new();
    for f in 0..n_cells {
        if material[f] {
            continue;
        }
        let r = void_uf.find(f);
        let idx = match void_roots.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                void_roots.push(r);
                void_open.push(false);
                void_roots.len() - 1
            }
        };
        if fine.element_vertices(f).iter().any(|&v| on_outer[v]) {
            void_open[idx] = true;
        }
    }
    let holes = void_open.iter().filter(|&&open| !open).count();

    if boundary.dirichlet.is_empty() {
        let report = FilterReport {
            components_before,
            components_kept: components_before,
            holes,
            removed_cells: 0,
        };
        return Ok((phi.clone(), report));
    }
    let components_kept = touches.iter().filter(|&&t| t).count();
    if components_kept == 0 {
        return Err(Error::DetachedFromDirichlet);
    }
    if components_kept == components_before {
        let report = FilterReport {
            components_before,
            components_kept,
            holes,
            removed_cells: 0,
        };
        return Ok((phi.clone(), report));
    }

    // flip values on removed components, sparing vertices of kept cells
    let mut keep_vertex = vec![false; fine.n_vertices()];
    let mut removed_cells = 0usize;
    for f in 0..n_cells {
        if material[f] && touches[root_of[f]] {
            for &v in fine.element_vertices(f) {
                keep_vertex[v] = true;
            }
        }
    }
    let mut values = phi.values.clone();
    for f in 0..n_cells {
        if material[f] && !touches[root_of[f]] {
            removed_cells += 1;
            for &v in fine.element_vertices(f) {
                if !keep_vertex[v] {
                    values[v] = -values[v].abs();
                }
            }
        }
    }
    let report = FilterReport { components_before, components_kept, holes, removed_cells };
    Ok((LevelSetField::new(mesh.clone(), values), report))
}
