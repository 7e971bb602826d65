//! Small planar geometry helpers shared by the mesh and cut-cell code.

use nalgebra::Vector2;

pub type Point2 = Vector2<f64>;

/// Signed area of a polygon given by its vertex loop (positive for CCW).
pub fn polygon_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice
}

/// Vertex average of a polygon. Interior for convex polygons, which is all
/// the fan triangulation needs.
pub fn polygon_vertex_centroid(vertices: &[Point2]) -> Point2 {
    let mut c = Point2::zeros();
    for v in vertices {
        c += v;
    }
    c / vertices.len() as f64
}

/// Straight segment with an attached unit normal.
#[derive(Debug, Clone, Copy)]
pub struct OrientedSegment {
    pub a: Point2,
    pub b: Point2,
    pub normal: Vector2<f64>,
}

impl OrientedSegment {
    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    pub fn midpoint(&self) -> Point2 {
        0.5 * (self.a + self.b)
    }
}

/// Axis-aligned segment on the design-domain boundary, stored as endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(ax: f64, ay: f64, bx: f64, by: f64) -> Self {
        Segment { a: Point2::new(ax, ay), b: Point2::new(bx, by) }
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    /// Distance from `p` to the segment.
    pub fn distance(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return (p - self.a).norm();
        }
        let t = ((p - self.a).dot(&d) / len2).clamp(0.0, 1.0);
        (p - (self.a + t * d)).norm()
    }

    /// Whether `p` lies on the segment within `tol`.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Overlap of another collinear segment with this one, or `None` when the
    /// overlap is empty or the segments are not collinear within `tol`.
    pub fn clip_collinear(&self, a: Point2, b: Point2, tol: f64) -> Option<(Point2, Point2)> {
        let d = self.b - self.a;
        let len = d.norm();
        if len == 0.0 {
            return None;
        }
        let dir = d / len;
        // reject if either endpoint is off the carrier line
        for p in [a, b] {
            let r = p - self.a;
            let off = (r - r.dot(&dir) * dir).norm();
            if off > tol {
                return None;
            }
        }
        let ta = (a - self.a).dot(&dir);
        let tb = (b - self.a).dot(&dir);
        let (lo, hi) = (ta.min(tb).max(0.0), ta.max(tb).min(len));
        if hi - lo <= tol {
            return None;
        }
        Some((self.a + lo * dir, self.a + hi * dir))
    }
}
