//! Lagrange shape functions in the local frame of a grid cell.
//!
//! Every element of a background mesh is an axis-aligned translate of one of
//! three unit shapes (cell quad, lower triangle, upper triangle) scaled by
//! the spacing `h`, so one coefficient table per shape serves the whole mesh.
//! Bases are stored as coefficients over scaled monomials `u^p v^q` with
//! `(u, v) = ((x - x0)/h, (y - y0)/h)`, which makes values, gradients and the
//! higher-order normal derivatives needed by the face penalties exact and
//! cheap to evaluate.

use crate::mesh::{local_node_lattice, ElementKind};
use nalgebra::{DMatrix, DVector, Vector2};

#[derive(Debug, Clone)]
pub struct ShapeTable {
    pub kind: ElementKind,
    pub k: usize,
    pub lower: bool,
    powers: Vec<(u32, u32)>,
    /// (node, monomial) coefficients: basis_i(u, v) = sum_m coeffs[(i, m)] u^p v^q
    coeffs: DMatrix<f64>,
    /// local node coordinates in the unit cell
    pub nodes: Vec<(f64, f64)>,
}

fn monomial_powers(kind: ElementKind, k: usize) -> Vec<(u32, u32)> {
    let mut powers = Vec::new();
    match kind {
        ElementKind::Quadrilateral => {
            for q in 0..=k as u32 {
                for p in 0..=k as u32 {
                    powers.push((p, q));
                }
            }
        }
        ElementKind::Triangle => {
            for q in 0..=k as u32 {
                for p in 0..=(k as u32 - q) {
                    powers.push((p, q));
                }
            }
        }
    }
    powers
}

/// Falling factorial p (p-1) ... (p-r+1); the coefficient produced by
/// differentiating u^p exactly r times.
fn falling(p: u32, r: u32) -> f64 {
    if r > p {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..r {
        acc *= (p - i) as f64;
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

impl ShapeTable {
    /// Builds the nodal basis of order `k` for the given shape. `lower`
    /// selects the below-diagonal triangle and is ignored for quads.
    pub fn new(kind: ElementKind, k: usize, lower: bool) -> Self {
        let powers = monomial_powers(kind, k);
        let lattice = local_node_lattice(kind, k, lower);
        let nodes: Vec<(f64, f64)> = lattice
            .iter()
            .map(|&(a, b)| (a as f64 / k as f64, b as f64 / k as f64))
            .collect();
        let n = nodes.len();
        assert_eq!(n, powers.len());
        let vandermonde = DMatrix::from_fn(n, n, |i, m| {
            let (u, v) = nodes[i];
            let (p, q) = powers[m];
            u.powi(p as i32) * v.powi(q as i32)
        });
        let inv = vandermonde
            .try_inverse()
            .expect("Lagrange Vandermonde is invertible");
        ShapeTable { kind, k, lower, powers, coeffs: inv.transpose(), nodes }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Basis values at local point (u, v).
    pub fn values(&self, u: f64, v: f64) -> DVector<f64> {
        let monos = DVector::from_fn(self.powers.len(), |m, _| {
            let (p, q) = self.powers[m];
            u.powi(p as i32) * v.powi(q as i32)
        });
        &self.coeffs * monos
    }

    /// Physical-space gradients (d/dx, d/dy) at local (u, v) for an element
    /// of spacing `h`.
    pub fn gradients(&self, u: f64, v: f64, h: f64) -> (DVector<f64>, DVector<f64>) {
        let du = DVector::from_fn(self.powers.len(), |m, _| {
            let (p, q) = self.powers[m];
            falling(p, 1) * powi_or_zero(u, p as i32 - 1) * v.powi(q as i32)
        });
        let dv = DVector::from_fn(self.powers.len(), |m, _| {
            let (p, q) = self.powers[m];
            u.powi(p as i32) * falling(q, 1) * powi_or_zero(v, q as i32 - 1)
        });
        ((&self.coeffs * du) / h, (&self.coeffs * dv) / h)
    }

    /// Physical j-th directional derivative (n . grad)^j of every basis
    /// function at local (u, v), for a unit direction `n` and spacing `h`.
    pub fn normal_derivatives(
        &self,
        j: u32,
        n: Vector2<f64>,
        u: f64,
        v: f64,
        h: f64,
    ) -> DVector<f64> {
        let monos = DVector::from_fn(self.powers.len(), |m, _| {
            let (p, q) = self.powers[m];
            let mut acc = 0.0;
            for r in 0..=j {
                let s = j - r;
                let c = binomial(j, r) * n.x.powi(r as i32) * n.y.powi(s as i32);
                if c == 0.0 {
                    continue;
                }
                let fu = falling(p, r);
                let fv = falling(q, s);
                if fu == 0.0 || fv == 0.0 {
                    continue;
                }
                acc += c
                    * fu
                    * fv
                    * powi_or_zero(u, p as i32 - r as i32)
                    * powi_or_zero(v, q as i32 - s as i32);
            }
            acc
        });
        (&self.coeffs * monos) / h.powi(j as i32)
    }
}

fn powi_or_zero(x: f64, e: i32) -> f64 {
    if e < 0 {
        // only reached with zero falling-factorial coefficient
        0.0
    } else {
        x.powi(e)
    }
}

/// The tables needed for one mesh: quads use `[0]`, triangle meshes use
/// `[0]` for lower and `[1]` for upper elements.
#[derive(Debug, Clone)]
pub struct ShapeTables {
    tables: Vec<ShapeTable>,
    kind: ElementKind,
}

impl ShapeTables {
    pub fn new(kind: ElementKind, k: usize) -> Self {
        let tables = match kind {
            ElementKind::Quadrilateral => vec![ShapeTable::new(kind, k, true)],
            ElementKind::Triangle => vec![
                ShapeTable::new(kind, k, true),
                ShapeTable::new(kind, k, false),
            ],
        };
        ShapeTables { tables, kind }
    }

    /// Table for element `e` of `mesh` (which must have the same kind).
    pub fn for_element(&self, mesh: &crate::mesh::BackgroundMesh, e: usize) -> &ShapeTable {
        match self.kind {
            ElementKind::Quadrilateral => &self.tables[0],
            ElementKind::Triangle => {
                if mesh.is_lower_triangle(e) {
                    &self.tables[0]
                } else {
                    &self.tables[1]
                }
            }
        }
    }
}

/// Precomputed quadrature data of the linear basis on one fine-cell shape,
/// used by the fine-mesh assemblies (reinitialization, transport, velocity).
#[derive(Debug, Clone)]
pub(crate) struct P1Cell {
    pub weights: Vec<f64>,
    /// (point, node) basis values
    pub values: Vec<Vec<f64>>,
    /// (point, node) physical gradients
    pub grads: Vec<Vec<Vector2<f64>>>,
    pub mass: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
}

/// P1 cell data per shape of a mesh with spacing `hf`: quads use `[0]`,
/// triangle meshes `[0]` (lower) and `[1]` (upper). Pair with
/// `BackgroundMesh::lattice_vertices`.
pub(crate) fn p1_cells(kind: ElementKind, hf: f64) -> Vec<P1Cell> {
    let shapes: Vec<(Vec<(f64, f64)>, bool)> = match kind {
        ElementKind::Quadrilateral => {
            vec![(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], true)]
        }
        ElementKind::Triangle => vec![
            (vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)], true),
            (vec![(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)], false),
        ],
    };
    shapes
        .into_iter()
        .map(|(corners, lower)| {
            let table = ShapeTable::new(kind, 1, lower);
            // quads use the mirror-symmetric 2x2 tensor Gauss rule: besides
            // exactness for the bilinear products, nonpolynomial integrands
            // like |grad phi| must not pick up orientation bias
            let rule = match kind {
                ElementKind::Quadrilateral => {
                    let (x, w) = crate::cutquad::gauss_legendre_unit(2);
                    let mut rule = crate::cutquad::QuadratureRule::default();
                    for (i, &xi) in x.iter().enumerate() {
                        for (j, &xj) in x.iter().enumerate() {
                            rule.points.push(crate::geometry::Point2::new(xi * hf, xj * hf));
                            rule.weights.push(w[i] * w[j] * hf * hf);
                        }
                    }
                    rule
                }
                ElementKind::Triangle => {
                    let polygon: Vec<crate::geometry::Point2> = corners
                        .iter()
                        .map(|&(u, v)| crate::geometry::Point2::new(u * hf, v * hf))
                        .collect();
                    crate::cutquad::volume_rule(&polygon, 4, hf * hf)
                }
            };
            let n = table.n_nodes();
            let mut values = Vec::new();
            let mut grads = Vec::new();
            for &p in &rule.points {
                let (u, v) = (p.x / hf, p.y / hf);
                let vals = table.values(u, v);
                let (gx, gy) = table.gradients(u, v, hf);
                values.push((0..n).map(|i| vals[i]).collect::<Vec<_>>());
                grads.push((0..n).map(|i| Vector2::new(gx[i], gy[i])).collect::<Vec<_>>());
            }
            let mut mass = vec![vec![0.0; n]; n];
            let mut stiffness = vec![vec![0.0; n]; n];
            for (q, &w) in rule.weights.iter().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        mass[i][j] += w * values[q][i] * values[q][j];
                        stiffness[i][j] += w * grads[q][i].dot(&grads[q][j]);
                    }
                }
            }
            P1Cell { weights: rule.weights, values, grads, mass, stiffness }
        })
        .collect()
}

/// Shape slot of fine element `f` in the `p1_cells` vector.
pub(crate) fn p1_shape_index(fine: &crate::mesh::BackgroundMesh, f: usize) -> usize {
    match fine.kind {
        ElementKind::Quadrilateral => 0,
        ElementKind::Triangle => {
            if fine.is_lower_triangle(f) {
                0
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_tables(k: usize) -> Vec<ShapeTable> {
        vec![
            ShapeTable::new(ElementKind::Quadrilateral, k, true),
            ShapeTable::new(ElementKind::Triangle, k, true),
            ShapeTable::new(ElementKind::Triangle, k, false),
        ]
    }

    #[test]
    fn nodal_property() {
        for k in 1..=4 {
            for table in all_tables(k) {
                for (i, &(u, v)) in table.nodes.iter().enumerate() {
                    let vals = table.values(u, v);
                    for j in 0..table.n_nodes() {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert!(
                            (vals[j] - expected).abs() < 1e-9,
                            "k={k} node {i} basis {j}: {}",
                            vals[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_linear_reproduction() {
        let pts: [(f64, f64); 3] = [(0.13, 0.07), (0.52, 0.31), (0.83, 0.64)];
        for k in 1..=4 {
            for table in all_tables(k) {
                for &(u, v) in &pts {
                    // keep sample points inside triangles
                    let (u, v) = match (table.kind, table.lower) {
                        (ElementKind::Triangle, true) => (u.max(v), v.min(u)),
                        (ElementKind::Triangle, false) => (v.min(u), u.max(v)),
                        _ => (u, v),
                    };
                    let vals = table.values(u, v);
                    assert!((vals.sum() - 1.0).abs() < 1e-10);
                    // interpolation of x reproduces x, gradient is exact
                    let coef: Vec<f64> = table.nodes.iter().map(|&(a, _)| a).collect();
                    let x: f64 = vals.iter().zip(&coef).map(|(b, c)| b * c).sum();
                    assert!((x - u).abs() < 1e-10);
                    let h = 0.25;
                    let (gx, gy) = table.gradients(u, v, h);
                    let dx: f64 = gx.iter().zip(&coef).map(|(b, c)| b * c).sum();
                    let dy: f64 = gy.iter().zip(&coef).map(|(b, c)| b * c).sum();
                    assert!((dx - 1.0 / h).abs() < 1e-9 && dy.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn normal_derivatives_match_difference_quotients() {
        let n = Vector2::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
        let h = 0.5;
        for k in 1..=3usize {
            let table = ShapeTable::new(ElementKind::Quadrilateral, k, true);
            let (u, v) = (0.4, 0.3);
            for j in 1..=k as u32 {
                let exact = table.normal_derivatives(j, n, u, v, h);
                // central difference of the (j-1)-th derivative along n
                let eps = 1e-5;
                let up = table.normal_derivatives(j - 1, n, u + eps * n.x, v + eps * n.y, h);
                let dn = table.normal_derivatives(j - 1, n, u - eps * n.x, v - eps * n.y, h);
                for i in 0..table.n_nodes() {
                    let fd = (up[i] - dn[i]) / (2.0 * eps * h);
                    assert!(
                        (exact[i] - fd).abs() < 1e-4 * (1.0 + exact[i].abs()),
                        "k={k} j={j} basis {i}: exact {} fd {}",
                        exact[i],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn first_normal_derivative_equals_gradient_projection() {
        let table = ShapeTable::new(ElementKind::Triangle, 2, true);
        let n = Vector2::new(0.6, -0.8);
        let (u, v) = (0.7, 0.2);
        let h = 0.125;
        let nd = table.normal_derivatives(1, n, u, v, h);
        let (gx, gy) = table.gradients(u, v, h);
        for i in 0..table.n_nodes() {
            let proj = n.x * gx[i] + n.y * gy[i];
            assert!((nd[i] - proj).abs() < 1e-10);
        }
    }
}
