//! Piecewise linear cut geometry extracted from the level-set.
//!
//! Each fine element is clipped against the zero level of the interpolated
//! field by walking its edges: vertices with nonnegative values are kept
//! (zero counts as material, keeping the clipping watertight) and strict
//! sign changes insert edge crossings, with linear interpolation between
//! detected crossings on quads. Boundary segments connect consecutive
//! zero-valued clip vertices and carry the outward normal of the material.

use super::LevelSetField;
use crate::geometry::{polygon_area, polygon_vertex_centroid, OrientedSegment, Point2};
use crate::mesh::{ElementKind, RefinedMesh};
use crate::parallel::{map_range, Parallelism};
use nalgebra::Vector2;
use std::sync::Arc;

/// Material geometry inside one fine element.
#[derive(Debug, Clone, Default)]
pub struct CellCut {
    /// clipped material region, as 0..=2 convex CCW polygons
    pub polygons: Vec<Vec<Point2>>,
    /// zero level-set pieces with outward (material to void) normals
    pub segments: Vec<OrientedSegment>,
}

impl CellCut {
    pub fn area(&self) -> f64 {
        self.polygons.iter().map(|p| polygon_area(p)).sum()
    }
}

/// Clipped polygons and boundary segments for every fine element.
#[derive(Debug, Clone)]
pub struct CutGeometry {
    pub mesh: Arc<RefinedMesh>,
    pub cells: Vec<CellCut>,
}

impl CutGeometry {
    /// Total material area.
    pub fn material_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area()).sum()
    }

    /// Material area inside coarse element `e`.
    pub fn coarse_element_area(&self, e: usize) -> f64 {
        self.mesh.children(e).iter().map(|&f| self.cells[f].area()).sum()
    }

    pub fn all_segments(&self) -> impl Iterator<Item = &OrientedSegment> {
        self.cells.iter().flat_map(|c| c.segments.iter())
    }
}

/// Gradient of the interpolated level-set on fine element `f` at local (u, v).
fn trace_gradient(
    mesh: &RefinedMesh,
    vals: &[f64],
    f: usize,
    u: f64,
    v: f64,
) -> Vector2<f64> {
    let h = mesh.fine.h;
    match mesh.fine.kind {
        ElementKind::Triangle => {
            if mesh.fine.is_lower_triangle(f) {
                Vector2::new(vals[1] - vals[0], vals[2] - vals[1]) / h
            } else {
                Vector2::new(vals[1] - vals[2], vals[2] - vals[0]) / h
            }
        }
        ElementKind::Quadrilateral => {
            let du = (1.0 - v) * (vals[1] - vals[0]) + v * (vals[2] - vals[3]);
            let dv = (1.0 - u) * (vals[3] - vals[0]) + u * (vals[2] - vals[1]);
            Vector2::new(du, dv) / h
        }
    }
}

/// Clip-polygon vertex paired with its level-set value (crossings carry 0).
type Tagged = (Point2, f64);

fn clip_walk(pts: &[Point2], vals: &[f64]) -> Vec<Tagged> {
    let n = pts.len();
    let mut poly = Vec::with_capacity(n + 2);
    for i in 0..n {
        let j = (i + 1) % n;
        if vals[i] >= 0.0 {
            poly.push((pts[i], vals[i]));
        }
        if vals[i] * vals[j] < 0.0 {
            let t = vals[i] / (vals[i] - vals[j]);
            poly.push((pts[i] + t * (pts[j] - pts[i]), 0.0));
        }
    }
    poly
}

fn crossing(a: Point2, b: Point2, va: f64, vb: f64) -> Point2 {
    let t = va / (va - vb);
    a + t * (b - a)
}

/// Emits (polygon, segments) pairs from a tagged clip polygon: segments are
/// the consecutive zero-valued vertex pairs.
fn polygon_and_segments(
    tagged: Vec<Tagged>,
    area_scale: f64,
    out: &mut CellCut,
    orient: &impl Fn(Point2, Point2, Point2) -> Vector2<f64>,
) {
    if tagged.len() < 3 {
        return;
    }
    let poly: Vec<Point2> = tagged.iter().map(|t| t.0).collect();
    if polygon_area(&poly) < 1e-14 * area_scale {
        return;
    }
    let centroid = polygon_vertex_centroid(&poly);
    let n = tagged.len();
    let min_len = 1e-12 * area_scale.sqrt();
    for i in 0..n {
        let j = (i + 1) % n;
        if tagged[i].1 == 0.0 && tagged[j].1 == 0.0 {
            let (a, b) = (tagged[i].0, tagged[j].0);
            if (b - a).norm() > min_len {
                out.segments.push(OrientedSegment { a, b, normal: orient(a, b, centroid) });
            }
        }
    }
    out.polygons.push(poly);
}

fn extract_cell(phi: &LevelSetField, f: usize) -> CellCut {
    let mesh = &phi.mesh;
    let fine = &mesh.fine;
    let pts = fine.element_polygon(f);
    let vals: Vec<f64> = fine
        .element_vertices(f)
        .iter()
        .map(|&v| phi.values[v])
        .collect();
    let area_scale = fine.element_area(f);
    let mut cut = CellCut::default();

    let has_pos = vals.iter().any(|&v| v > 0.0);
    let has_neg = vals.iter().any(|&v| v < 0.0);
    let has_zero = vals.iter().any(|&v| v == 0.0);
    if !has_pos {
        return cut; // no material
    }

    // outward normal: against the trace gradient, falling back to pointing
    // away from the material polygon
    let orient = |a: Point2, b: Point2, centroid: Point2| -> Vector2<f64> {
        let d = (b - a).normalize();
        let mut n = Vector2::new(d.y, -d.x);
        let mid = 0.5 * (a + b);
        let origin = fine.element_origin(f);
        let g = trace_gradient(
            mesh,
            &vals,
            f,
            (mid.x - origin.x) / fine.h,
            (mid.y - origin.y) / fine.h,
        );
        let along = n.dot(&g);
        if along.abs() > 1e-12 * g.norm().max(1e-300) {
            if along > 0.0 {
                n = -n;
            }
        } else if n.dot(&(mid - centroid)) < 0.0 {
            n = -n;
        }
        n
    };

    if !has_neg && !has_zero {
        // strictly positive: full element, no boundary
        cut.polygons.push(pts);
        return cut;
    }

    // saddle quad with strictly alternating signs: resolve by the sign of the
    // cell-center value (ties count as material, connecting through the center)
    if fine.kind == ElementKind::Quadrilateral && !has_zero {
        let signs: Vec<bool> = vals.iter().map(|&v| v > 0.0).collect();
        let alternating = signs[0] == signs[2] && signs[1] == signs[3] && signs[0] != signs[1];
        if alternating {
            let center = 0.25 * vals.iter().sum::<f64>();
            if center >= 0.0 {
                // hexagonal band through the center
                polygon_and_segments(clip_walk(&pts, &vals), area_scale, &mut cut, &orient);
            } else {
                // two corner triangles at the positive vertices
                for c in [0usize, 1] {
                    let i = if signs[0] { 2 * c } else { 2 * c + 1 };
                    let prev = (i + 3) % 4;
                    let next = (i + 1) % 4;
                    let tagged = vec![
                        (pts[i], vals[i]),
                        (crossing(pts[i], pts[next], vals[i], vals[next]), 0.0),
                        (crossing(pts[prev], pts[i], vals[prev], vals[i]), 0.0),
                    ];
                    polygon_and_segments(tagged, area_scale, &mut cut, &orient);
                }
            }
            return cut;
        }
    }

    polygon_and_segments(clip_walk(&pts, &vals), area_scale, &mut cut, &orient);
    cut
}

/// Extracts the material polygons and boundary segments of every fine element.
pub fn extract_geometry(phi: &LevelSetField, par: Parallelism) -> CutGeometry {
    let cells = map_range(par, phi.mesh.fine.n_elements(), |f| extract_cell(phi, f));
    CutGeometry { mesh: phi.mesh.clone(), cells }
}
