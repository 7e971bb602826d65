//! Fixed background mesh of the design domain and its uniform refinement.
//!
//! The design domain is an axis-aligned rectangle, optionally minus an
//! axis-aligned rectangular void (L-shape), tiled by an `h`-spaced grid of
//! quadrilaterals or of triangles (two per cell, fixed bottom-left to
//! top-right diagonal). Degrees of freedom of order-`k` elements live on the
//! vertices of the `k`-fold refined mesh, so refinement carries an exact
//! node correspondence.

use crate::geometry::Point2;
use crate::{Error, Result};
use nalgebra::Vector2;
use std::sync::Arc;

pub const INVALID: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Triangle,
    Quadrilateral,
}

impl ElementKind {
    pub fn vertices_per_element(self) -> usize {
        match self {
            ElementKind::Triangle => 3,
            ElementKind::Quadrilateral => 4,
        }
    }

    pub fn elements_per_cell(self) -> usize {
        match self {
            ElementKind::Triangle => 2,
            ElementKind::Quadrilateral => 1,
        }
    }
}

/// Axis-aligned rectangle, used for the optional void cut out of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    fn contains_strict(&self, p: Point2) -> bool {
        p.x > self.x0 && p.x < self.x1 && p.y > self.y0 && p.y < self.y1
    }
}

/// Design domain: rectangle `[0, width] x [0, height]` minus an optional void.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignDomain {
    pub width: f64,
    pub height: f64,
    pub void: Option<Rect>,
}

impl DesignDomain {
    pub fn rectangle(width: f64, height: f64) -> Self {
        DesignDomain { width, height, void: None }
    }

    pub fn with_void(width: f64, height: f64, void: Rect) -> Self {
        DesignDomain { width, height, void: Some(void) }
    }

    pub fn diameter(&self) -> f64 {
        (self.width * self.width + self.height * self.height).sqrt()
    }

    pub fn area(&self) -> f64 {
        let void = self
            .void
            .map(|v| (v.x1 - v.x0) * (v.y1 - v.y0))
            .unwrap_or(0.0);
        self.width * self.height - void
    }

    fn cell_kept(&self, i: usize, j: usize, h: f64) -> bool {
        match self.void {
            None => true,
            Some(v) => {
                let center = Point2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                !v.contains_strict(center)
            }
        }
    }
}

fn exact_divisions(length: f64, h: f64, side: &'static str) -> Result<usize> {
    let n = (length / h).round();
    if n < 1.0 || (n * h - length).abs() > 1e-9 * length.max(h) {
        return Err(Error::MeshDivisibility { side, length, h });
    }
    Ok(n as usize)
}

/// Interior face shared by two elements. `normal` points out of `kplus`
/// (the element with the smaller id), defining the jump
/// `[[v]] = v|K+ - v|K-` and the face normal used in the penalty terms.
#[derive(Debug, Clone, Copy)]
pub struct Face {
    pub vertices: [usize; 2],
    pub kplus: usize,
    pub kminus: usize,
    pub normal: Vector2<f64>,
}

/// Boundary face of the design domain with its outward normal.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFace {
    pub vertices: [usize; 2],
    pub element: usize,
    pub normal: Vector2<f64>,
}

/// Uniform background mesh of the design domain.
#[derive(Debug, Clone)]
pub struct BackgroundMesh {
    pub kind: ElementKind,
    pub h: f64,
    pub domain: DesignDomain,
    pub nx: usize,
    pub ny: usize,
    pub vertices: Vec<Point2>,
    conn: Vec<usize>,
    /// grid cell of each element
    element_cell: Vec<(usize, usize)>,
    pub interior_faces: Vec<Face>,
    pub boundary_faces: Vec<BoundaryFace>,
    /// grid vertex (i, j) -> vertex id (INVALID where the grid point is unused)
    vertex_grid: Vec<usize>,
    /// grid cell (i, j) -> first element id in that cell (INVALID for voided cells)
    cell_grid: Vec<usize>,
}

impl BackgroundMesh {
    pub fn n_elements(&self) -> usize {
        self.element_cell.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Vertex ids of element `e`, counter-clockwise.
    pub fn element_vertices(&self, e: usize) -> &[usize] {
        let s = self.kind.vertices_per_element();
        &self.conn[e * s..(e + 1) * s]
    }

    pub fn element_grid_cell(&self, e: usize) -> (usize, usize) {
        self.element_cell[e]
    }

    /// Bottom-left corner of the grid cell containing element `e`.
    pub fn element_origin(&self, e: usize) -> Point2 {
        let (i, j) = self.element_cell[e];
        Point2::new(i as f64 * self.h, j as f64 * self.h)
    }

    /// For triangle meshes: whether element `e` is the lower (below-diagonal)
    /// triangle of its cell.
    pub fn is_lower_triangle(&self, e: usize) -> bool {
        debug_assert_eq!(self.kind, ElementKind::Triangle);
        e % 2 == 0
    }

    /// Element vertices reordered to the local lattice order used by the
    /// shape tables (CCW connectivity and lattice order differ on quads and
    /// upper triangles).
    pub fn lattice_vertices(&self, e: usize) -> Vec<usize> {
        let vs = self.element_vertices(e);
        match self.kind {
            ElementKind::Quadrilateral => vec![vs[0], vs[1], vs[3], vs[2]],
            ElementKind::Triangle => {
                if self.is_lower_triangle(e) {
                    vs.to_vec()
                } else {
                    vec![vs[0], vs[2], vs[1]]
                }
            }
        }
    }

    /// Element corner coordinates as a CCW polygon.
    pub fn element_polygon(&self, e: usize) -> Vec<Point2> {
        self.element_vertices(e)
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    pub fn element_area(&self, e: usize) -> f64 {
        debug_assert!(e < self.n_elements());
        match self.kind {
            ElementKind::Quadrilateral => self.h * self.h,
            ElementKind::Triangle => 0.5 * self.h * self.h,
        }
    }

    pub fn vertex_at_grid(&self, i: usize, j: usize) -> Option<usize> {
        if i > self.nx || j > self.ny {
            return None;
        }
        let id = self.vertex_grid[j * (self.nx + 1) + i];
        (id != INVALID).then_some(id)
    }

    /// First element id of grid cell (i, j); the second triangle of a cell is
    /// the returned id plus one.
    pub fn element_at_cell(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        let id = self.cell_grid[j * self.nx + i];
        (id != INVALID).then_some(id)
    }

    /// Element containing point `p` (ties resolved toward lower cells).
    pub fn locate(&self, p: Point2) -> Option<usize> {
        let i = ((p.x / self.h).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let j = ((p.y / self.h).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        let first = self.element_at_cell(i, j)?;
        match self.kind {
            ElementKind::Quadrilateral => Some(first),
            ElementKind::Triangle => {
                let u = p.x / self.h - i as f64;
                let v = p.y / self.h - j as f64;
                Some(if v <= u { first } else { first + 1 })
            }
        }
    }

    /// K+, K- and the face normal of an interior face; the assignment is
    /// deterministic (K+ is the lower element id).
    pub fn face_jump_orientation(&self, face_id: usize) -> Result<(usize, usize, Vector2<f64>)> {
        let face = self
            .interior_faces
            .get(face_id)
            .ok_or(Error::NotInteriorFace(face_id))?;
        Ok((face.kplus, face.kminus, face.normal))
    }
}

/// Meshes the design domain with spacing `h`.
///
/// Sides (and void edges) must be integer multiples of `h` so the grid tiles
/// the domain exactly. Triangle cells split along the bottom-left to
/// top-right diagonal.
pub fn build_background_mesh(
    domain: &DesignDomain,
    h: f64,
    kind: ElementKind,
) -> Result<BackgroundMesh> {
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("mesh size h = {h} must be positive")));
    }
    let nx = exact_divisions(domain.width, h, "width")?;
    let ny = exact_divisions(domain.height, h, "height")?;
    if let Some(v) = domain.void {
        let ok = [v.x0, v.x1].iter().all(|&x| x >= 0.0 && x <= domain.width)
            && [v.y0, v.y1].iter().all(|&y| y >= 0.0 && y <= domain.height)
            && v.x1 > v.x0
            && v.y1 > v.y0;
        let on_grid = [v.x0, v.x1, v.y0, v.y1]
            .iter()
            .all(|&c| ((c / h).round() * h - c).abs() <= 1e-9 * domain.width.max(h));
        if !ok || !on_grid {
            return Err(Error::InvalidVoid);
        }
    }

    let kept: Vec<bool> = (0..nx * ny)
        .map(|c| domain.cell_kept(c % nx, c / nx, h))
        .collect();
    let cell_is_kept = |i: isize, j: isize| -> bool {
        i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && kept[j as usize * nx + i as usize]
    };

    // vertices: every grid point incident to a kept cell
    let mut vertex_grid = vec![INVALID; (nx + 1) * (ny + 1)];
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let incident = [(0isize, 0isize), (-1, 0), (0, -1), (-1, -1)]
                .iter()
                .any(|&(di, dj)| cell_is_kept(i as isize + di, j as isize + dj));
            if incident {
                vertex_grid[j * (nx + 1) + i] = vertices.len();
                vertices.push(Point2::new(i as f64 * h, j as f64 * h));
            }
        }
    }
    let vid = |i: usize, j: usize| vertex_grid[j * (nx + 1) + i];

    // elements
    let mut conn = Vec::new();
    let mut element_cell = Vec::new();
    let mut cell_grid = vec![INVALID; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if !kept[j * nx + i] {
                continue;
            }
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v11 = vid(i + 1, j + 1);
            let v01 = vid(i, j + 1);
            cell_grid[j * nx + i] = element_cell.len();
            match kind {
                ElementKind::Quadrilateral => {
                    conn.extend_from_slice(&[v00, v10, v11, v01]);
                    element_cell.push((i, j));
                }
                ElementKind::Triangle => {
                    conn.extend_from_slice(&[v00, v10, v11]); // lower
                    element_cell.push((i, j));
                    conn.extend_from_slice(&[v00, v11, v01]); // upper
                    element_cell.push((i, j));
                }
            }
        }
    }

    // faces: interior faces are owned by the lower element id side, which by
    // the sweep order is the left/bottom/lower-triangle element
    let mut interior_faces = Vec::new();
    let mut boundary_faces = Vec::new();
    let first_elem = |i: isize, j: isize| -> usize { cell_grid[j as usize * nx + i as usize] };
    for j in 0..ny {
        for i in 0..nx {
            if !kept[j * nx + i] {
                continue;
            }
            let e0 = first_elem(i as isize, j as isize);
            let (right_elem, top_elem, bottom_elem, left_elem) = match kind {
                ElementKind::Quadrilateral => (e0, e0, e0, e0),
                // right and bottom edges belong to the lower triangle,
                // top and left edges to the upper one
                ElementKind::Triangle => (e0, e0 + 1, e0, e0 + 1),
            };
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v11 = vid(i + 1, j + 1);
            let v01 = vid(i, j + 1);
            if kind == ElementKind::Triangle {
                // in-cell diagonal; lower triangle is K+, outward normal up-left
                let s = std::f64::consts::FRAC_1_SQRT_2;
                interior_faces.push(Face {
                    vertices: [v00, v11],
                    kplus: e0,
                    kminus: e0 + 1,
                    normal: Vector2::new(-s, s),
                });
            }
            // right neighbor
            if cell_is_kept(i as isize + 1, j as isize) {
                let nb = first_elem(i as isize + 1, j as isize);
                let nb_left = match kind {
                    ElementKind::Quadrilateral => nb,
                    ElementKind::Triangle => nb + 1,
                };
                interior_faces.push(Face {
                    vertices: [v10, v11],
                    kplus: right_elem,
                    kminus: nb_left,
                    normal: Vector2::new(1.0, 0.0),
                });
            } else {
                boundary_faces.push(BoundaryFace {
                    vertices: [v10, v11],
                    element: right_elem,
                    normal: Vector2::new(1.0, 0.0),
                });
            }
            // top neighbor
            if cell_is_kept(i as isize, j as isize + 1) {
                let nb = first_elem(i as isize, j as isize + 1);
                interior_faces.push(Face {
                    vertices: [v01, v11],
                    kplus: top_elem,
                    kminus: nb,
                    normal: Vector2::new(0.0, 1.0),
                });
            } else {
                boundary_faces.push(BoundaryFace {
                    vertices: [v01, v11],
                    element: top_elem,
                    normal: Vector2::new(0.0, 1.0),
                });
            }
            // left/bottom sides only produce boundary faces (interior ones
            // were pushed by the neighbor)
            if !cell_is_kept(i as isize - 1, j as isize) {
                boundary_faces.push(BoundaryFace {
                    vertices: [v00, v01],
                    element: left_elem,
                    normal: Vector2::new(-1.0, 0.0),
                });
            }
            if !cell_is_kept(i as isize, j as isize - 1) {
                boundary_faces.push(BoundaryFace {
                    vertices: [v00, v10],
                    element: bottom_elem,
                    normal: Vector2::new(0.0, -1.0),
                });
            }
        }
    }

    Ok(BackgroundMesh {
        kind,
        h,
        domain: *domain,
        nx,
        ny,
        vertices,
        conn,
        element_cell,
        interior_faces,
        boundary_faces,
        vertex_grid,
        cell_grid,
    })
}

/// Background mesh plus its `k`-fold uniform refinement. Vertices of the fine
/// mesh coincide with the order-`k` Lagrange nodes of the coarse mesh.
#[derive(Debug, Clone)]
pub struct RefinedMesh {
    pub coarse: BackgroundMesh,
    pub fine: BackgroundMesh,
    pub k: usize,
    /// fine element -> coarse element
    pub parent: Vec<usize>,
    /// coarse element -> its k^2 fine elements (stride k^2)
    children: Vec<usize>,
    /// coarse element -> fine vertex id per Lagrange node (stride = nodes per element)
    element_nodes: Vec<usize>,
    pub nodes_per_element: usize,
}

impl RefinedMesh {
    pub fn children(&self, e: usize) -> &[usize] {
        let s = self.k * self.k;
        &self.children[e * s..(e + 1) * s]
    }

    /// Fine vertex ids of the Lagrange nodes of coarse element `e`, in the
    /// canonical local node order of the shape tables.
    pub fn nodes(&self, e: usize) -> &[usize] {
        let s = self.nodes_per_element;
        &self.element_nodes[e * s..(e + 1) * s]
    }

    pub fn fine_spacing(&self) -> f64 {
        self.fine.h
    }
}

/// Local Lagrange node layout on the unit cell, shared with the shape tables.
pub(crate) fn local_node_lattice(kind: ElementKind, k: usize, lower: bool) -> Vec<(usize, usize)> {
    let mut nodes = Vec::new();
    match kind {
        ElementKind::Quadrilateral => {
            for b in 0..=k {
                for a in 0..=k {
                    nodes.push((a, b));
                }
            }
        }
        ElementKind::Triangle => {
            for b in 0..=k {
                for a in 0..=k {
                    if (lower && b <= a) || (!lower && b >= a) {
                        nodes.push((a, b));
                    }
                }
            }
        }
    }
    nodes
}

pub fn nodes_per_element(kind: ElementKind, k: usize) -> usize {
    match kind {
        ElementKind::Quadrilateral => (k + 1) * (k + 1),
        ElementKind::Triangle => (k + 1) * (k + 2) / 2,
    }
}

/// Uniformly refines `mesh` so that fine vertices sit on the order-`k`
/// Lagrange nodes. `k = 1` reproduces the mesh with identity maps.
pub fn refine_uniform(mesh: BackgroundMesh, k: usize) -> Result<Arc<RefinedMesh>> {
    if !(1..=4).contains(&k) {
        return Err(Error::UnsupportedDegree(k));
    }
    let fine = build_background_mesh(&mesh.domain, mesh.h / k as f64, mesh.kind)?;
    let n_coarse = mesh.n_elements();
    let per = mesh.kind.elements_per_cell();

    // parent of each fine element
    let mut parent = vec![INVALID; fine.n_elements()];
    for f in 0..fine.n_elements() {
        let (fi, fj) = fine.element_grid_cell(f);
        let (ci, cj) = (fi / k, fj / k);
        let coarse_first = mesh
            .element_at_cell(ci, cj)
            .expect("fine cell inside a kept coarse cell");
        parent[f] = match mesh.kind {
            ElementKind::Quadrilateral => coarse_first,
            ElementKind::Triangle => {
                let (a, b) = (fi % k, fj % k);
                if b < a {
                    coarse_first
                } else if b > a {
                    coarse_first + 1
                } else if fine.is_lower_triangle(f) {
                    coarse_first
                } else {
                    coarse_first + 1
                }
            }
        };
    }

    // children, ordered by fine element id
    let stride = k * k;
    let mut counts = vec![0usize; n_coarse];
    let mut children = vec![INVALID; n_coarse * stride];
    for (f, &p) in parent.iter().enumerate() {
        children[p * stride + counts[p]] = f;
        counts[p] += 1;
    }
    debug_assert!(counts.iter().all(|&c| c == stride));

    // Lagrange node correspondence
    let npe = nodes_per_element(mesh.kind, k);
    let mut element_nodes = vec![INVALID; n_coarse * npe];
    for e in 0..n_coarse {
        let (ci, cj) = mesh.element_grid_cell(e);
        let lower = per == 1 || mesh.is_lower_triangle(e);
        let lattice = local_node_lattice(mesh.kind, k, lower);
        debug_assert_eq!(lattice.len(), npe);
        for (l, &(a, b)) in lattice.iter().enumerate() {
            let id = fine
                .vertex_at_grid(ci * k + a, cj * k + b)
                .expect("Lagrange node is a fine vertex");
            element_nodes[e * npe + l] = id;
        }
    }

    Ok(Arc::new(RefinedMesh {
        coarse: mesh,
        fine,
        k,
        parent,
        children,
        element_nodes,
        nodes_per_element: npe,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(h: f64, kind: ElementKind) -> BackgroundMesh {
        build_background_mesh(&DesignDomain::rectangle(1.0, 1.0), h, kind).unwrap()
    }

    #[test]
    fn quad_2x2_counts() {
        let m = unit_square(0.5, ElementKind::Quadrilateral);
        assert_eq!(m.n_elements(), 4);
        assert_eq!(m.n_vertices(), 9);
        assert_eq!(m.interior_faces.len(), 4);
        assert_eq!(m.boundary_faces.len(), 8);
    }

    #[test]
    fn triangle_2x2_counts() {
        // 4 cells x 2 triangles, 9 vertices. Interior face count by the edge
        // incidence oracle: 3 edges per triangle, boundary edges counted once,
        // interior twice: (3 * 8 - 8) / 2 = 8.
        let m = unit_square(0.5, ElementKind::Triangle);
        assert_eq!(m.n_elements(), 8);
        assert_eq!(m.n_vertices(), 9);
        let boundary = m.boundary_faces.len();
        assert_eq!(boundary, 8);
        let expected_interior = (3 * m.n_elements() - boundary) / 2;
        assert_eq!(m.interior_faces.len(), expected_interior);
        assert_eq!(expected_interior, 8);
    }

    #[test]
    fn every_triangle_edge_is_some_face_exactly_once() {
        // face bookkeeping oracle: gather each element's edges and match them
        // against the interior + boundary face lists
        let m = unit_square(0.25, ElementKind::Triangle);
        let mut edge_count = std::collections::HashMap::new();
        for e in 0..m.n_elements() {
            let vs = m.element_vertices(e);
            for i in 0..vs.len() {
                let a = vs[i];
                let b = vs[(i + 1) % vs.len()];
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        for f in &m.interior_faces {
            let key = (f.vertices[0].min(f.vertices[1]), f.vertices[0].max(f.vertices[1]));
            assert_eq!(edge_count.remove(&key), Some(2), "interior face not shared twice");
        }
        for f in &m.boundary_faces {
            let key = (f.vertices[0].min(f.vertices[1]), f.vertices[0].max(f.vertices[1]));
            assert_eq!(edge_count.remove(&key), Some(1), "boundary face not unique");
        }
        assert!(edge_count.is_empty(), "edges not covered by face lists");
    }

    #[test]
    fn cantilever_domain_counts() {
        // 2 m x 1 m rectangle at h = 0.25: an 8 x 4 grid of quads
        let domain = DesignDomain::rectangle(2.0, 1.0);
        let m = build_background_mesh(&domain, 0.25, ElementKind::Quadrilateral).unwrap();
        assert_eq!((m.nx, m.ny), (8, 4));
        assert_eq!(m.n_elements(), 32);
    }

    #[test]
    fn indivisible_side_is_rejected() {
        let domain = DesignDomain::rectangle(1.0, 1.0);
        let err = build_background_mesh(&domain, 0.3, ElementKind::Quadrilateral).unwrap_err();
        assert!(matches!(err, Error::MeshDivisibility { side: "width", .. }));
    }

    #[test]
    fn element_areas_tile_the_domain() {
        for kind in [ElementKind::Quadrilateral, ElementKind::Triangle] {
            let domain = DesignDomain::with_void(2.0, 2.0, Rect::new(1.0, 1.0, 2.0, 2.0));
            let m = build_background_mesh(&domain, 0.25, kind).unwrap();
            let total: f64 = (0..m.n_elements()).map(|e| m.element_area(e)).sum();
            assert!((total - domain.area()).abs() < 1e-12 * domain.area());
        }
    }

    #[test]
    fn l_shape_void_removes_cells() {
        let domain = DesignDomain::with_void(2.0, 2.0, Rect::new(1.0, 1.0, 2.0, 2.0));
        let m = build_background_mesh(&domain, 0.5, ElementKind::Quadrilateral).unwrap();
        assert_eq!(m.n_elements(), 12); // 16 cells minus 4 voided
        assert!(m.element_at_cell(3, 3).is_none());
        assert!(m.element_at_cell(0, 0).is_some());
    }

    #[test]
    fn face_orientation_convention() {
        let m = unit_square(0.5, ElementKind::Quadrilateral);
        for (id, f) in m.interior_faces.iter().enumerate() {
            assert!(f.kplus < f.kminus, "K+ must be the lower element id");
            let (kp, km, n) = m.face_jump_orientation(id).unwrap();
            assert_eq!((kp, km), (f.kplus, f.kminus));
            // normal points from K+ toward K-
            let cp = m.element_origin(kp) + Point2::new(0.25, 0.25);
            let cm = m.element_origin(km) + Point2::new(0.25, 0.25);
            assert!(n.dot(&(cm - cp)) > 0.0);
        }
        // vertical face between two horizontally adjacent quads: normal +x
        let f = m
            .interior_faces
            .iter()
            .find(|f| f.normal.x.abs() > 0.5 && f.kplus == 0)
            .unwrap();
        assert_eq!(f.kminus, 1);
        assert!((f.normal - Vector2::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m.face_jump_orientation(m.interior_faces.len()).is_err());
    }

    #[test]
    fn refine_identity_for_k1() {
        let m = unit_square(0.5, ElementKind::Quadrilateral);
        let r = refine_uniform(m, 1).unwrap();
        assert_eq!(r.fine.n_elements(), r.coarse.n_elements());
        assert_eq!(r.fine.n_vertices(), r.coarse.n_vertices());
        for e in 0..r.coarse.n_elements() {
            assert_eq!(r.parent[e], e);
            assert_eq!(r.children(e), &[e]);
            assert_eq!(r.nodes(e), r.coarse.lattice_vertices(e));
        }
    }

    #[test]
    fn refine_quad_k3_matches_lagrange_lattice() {
        let m = unit_square(0.5, ElementKind::Quadrilateral);
        let r = refine_uniform(m, 3).unwrap();
        assert_eq!(r.fine.n_elements(), 9 * r.coarse.n_elements());
        for e in 0..r.coarse.n_elements() {
            assert_eq!(r.children(e).len(), 9);
            let nodes = r.nodes(e);
            assert_eq!(nodes.len(), 16);
            let origin = r.coarse.element_origin(e);
            let h = r.coarse.h;
            let mut l = 0;
            for b in 0..=3 {
                for a in 0..=3 {
                    let expected =
                        origin + Point2::new(a as f64 / 3.0 * h, b as f64 / 3.0 * h);
                    let actual = r.fine.vertices[nodes[l]];
                    assert!((actual - expected).norm() <= 1e-12 * h);
                    l += 1;
                }
            }
        }
    }

    #[test]
    fn refine_triangle_k2_midpoint_oracle() {
        let m = unit_square(0.5, ElementKind::Triangle);
        let r = refine_uniform(m, 2).unwrap();
        assert_eq!(r.fine.n_elements(), 4 * r.coarse.n_elements());
        for e in 0..r.coarse.n_elements() {
            assert_eq!(r.children(e).len(), 4);
            // node correspondence: corners plus edge midpoints
            let vs: Vec<Point2> = r
                .coarse
                .element_vertices(e)
                .iter()
                .map(|&v| r.coarse.vertices[v])
                .collect();
            let mut expected = vs.clone();
            for i in 0..3 {
                expected.push(0.5 * (vs[i] + vs[(i + 1) % 3]));
            }
            let nodes = r.nodes(e);
            assert_eq!(nodes.len(), 6);
            for &n in nodes {
                let p = r.fine.vertices[n];
                assert!(
                    expected.iter().any(|&q| (p - q).norm() <= 1e-12 * r.coarse.h),
                    "node {p:?} is not a corner or midpoint"
                );
            }
            // every child triangle has a quarter of the area
            for &c in r.children(e) {
                assert!((r.fine.element_area(c) - r.coarse.element_area(e) / 4.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn locate_points() {
        let m = unit_square(0.5, ElementKind::Triangle);
        let below = m.locate(Point2::new(0.3, 0.1)).unwrap();
        assert!(m.is_lower_triangle(below));
        let above = m.locate(Point2::new(0.1, 0.3)).unwrap();
        assert!(!m.is_lower_triangle(above));
    }
}
