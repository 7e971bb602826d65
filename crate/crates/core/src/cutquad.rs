//! Quadrature on clipped polygons, boundary segments and mesh faces.
//!
//! Volume rules fan-triangulate the (convex) clipped polygon from its vertex
//! centroid and place a collapsed tensor Gauss rule on each fan triangle,
//! exact for bivariate polynomials up to the requested total degree. Line
//! rules are Gauss-Legendre mapped to the segment.

use crate::geometry::{polygon_area, polygon_vertex_centroid, Point2};

/// Points and weights in physical coordinates. Weights carry the measure of
/// the integration region (area for volume rules, length for line rules).
#[derive(Debug, Clone, Default)]
pub struct QuadratureRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integrates a function over the rule.
    pub fn integrate(&self, mut f: impl FnMut(Point2) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    fn append(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Gauss-Legendre nodes and weights on [0, 1], exact for degree 2n - 1.
/// Computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one Gauss point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // initial guess (Chebyshev-like), roots in (-1, 1), descending
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 0.5 * w;
    }
    // ascending order for determinism in tests
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| nodes[a].partial_cmp(&nodes[b]).unwrap());
    let nodes_sorted = idx.iter().map(|&i| nodes[i]).collect();
    let weights_sorted = idx.iter().map(|&i| weights[i]).collect();
    (nodes_sorted, weights_sorted)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Rule on the triangle (a, b, c), exact for total degree `degree`.
///
/// Built by the Duffy map (u, v) -> (u(1-v), uv) from the unit square, whose
/// Jacobian u raises the u-degree by one.
pub fn triangle_rule(a: Point2, b: Point2, c: Point2, degree: i32) -> QuadratureRule {
    let d = degree.max(0) as usize;
    let n_u = (d + 3) / 2; // the Jacobian raises the u-degree to d + 1
    let n_v = (d + 2) / 2;
    let (xu, wu) = gauss_legendre_unit(n_u);
    let (xv, wv) = gauss_legendre_unit(n_v);
    let e1 = b - a;
    let e2 = c - a;
    let jac = (e1.x * e2.y - e1.y * e2.x).abs();
    let mut rule = QuadratureRule::default();
    for (iu, &u) in xu.iter().enumerate() {
        for (iv, &v) in xv.iter().enumerate() {
            let r = u * (1.0 - v);
            let s = u * v;
            rule.points.push(a + r * e1 + s * e2);
            rule.weights.push(wu[iu] * wv[iv] * u * jac);
        }
    }
    rule
}

/// Rule over a convex CCW polygon, exact for total degree `degree`.
/// Degenerate polygons (area below `1e-14 * area_scale`) give an empty rule.
pub fn volume_rule(polygon: &[Point2], degree: i32, area_scale: f64) -> QuadratureRule {
    if polygon.len() < 3 {
        return QuadratureRule::default();
    }
    let area = polygon_area(polygon);
    if area < 1e-14 * area_scale.max(f64::MIN_POSITIVE) {
        return QuadratureRule::default();
    }
    let centroid = polygon_vertex_centroid(polygon);
    let mut rule = QuadratureRule::default();
    let n = polygon.len();
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let sub_area = polygon_area(&[centroid, a, b]);
        if sub_area > 1e-16 * area_scale.max(f64::MIN_POSITIVE) {
            rule.append(triangle_rule(centroid, a, b, degree));
        }
    }
    rule
}

/// Gauss-Legendre rule on the segment from `a` to `b`, exact for `degree`.
/// Zero-length segments give an empty rule.
pub fn line_rule(a: Point2, b: Point2, degree: i32) -> QuadratureRule {
    let len = (b - a).norm();
    if len == 0.0 {
        return QuadratureRule::default();
    }
    let n = (degree.max(0) as usize) / 2 + 1;
    let (x, w) = gauss_legendre_unit(n);
    let mut rule = QuadratureRule::default();
    for i in 0..n {
        rule.points.push(a + x[i] * (b - a));
        rule.weights.push(w[i] * len);
    }
    rule
}

/// Rule over a full interior mesh face (a segment), exact for `degree`.
pub fn face_rule(a: Point2, b: Point2, degree: i32) -> QuadratureRule {
    line_rule(a, b, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integral of x^p y^q over the triangle (a, b, c), by affine substitution
    /// and the exact reference moments u^m v^n -> m! n! / (m + n + 2)!.
    /// Independent of the Gauss machinery.
    pub fn monomial_over_triangle(a: Point2, b: Point2, c: Point2, p: u32, q: u32) -> f64 {
        fn binom(n: u32, k: u32) -> f64 {
            let mut r = 1.0;
            for i in 0..k {
                r = r * (n - i) as f64 / (i + 1) as f64;
            }
            r
        }
        fn factorial(n: u32) -> f64 {
            (1..=n).map(|i| i as f64).product()
        }
        let e1 = b - a;
        let e2 = c - a;
        let jac = (e1.x * e2.y - e1.y * e2.x).abs();
        // x = a.x + u e1.x + v e2.x, expand (a.x + u e1.x + v e2.x)^p etc.
        let mut total = 0.0;
        for i in 0..=p {
            for j in 0..=(p - i) {
                let cx = binom(p, i) * binom(p - i, j)
                    * a.x.powi((p - i - j) as i32)
                    * e1.x.powi(i as i32)
                    * e2.x.powi(j as i32);
                for r in 0..=q {
                    for s in 0..=(q - r) {
                        let cy = binom(q, r) * binom(q - r, s)
                            * a.y.powi((q - r - s) as i32)
                            * e1.y.powi(r as i32)
                            * e2.y.powi(s as i32);
                        let m = (i + r) as u32;
                        let n = (j + s) as u32;
                        let moment = factorial(m) * factorial(n) / factorial(m + n + 2);
                        total += cx * cy * moment;
                    }
                }
            }
        }
        total * jac
    }

    fn monomial_over_polygon(polygon: &[Point2], p: u32, q: u32) -> f64 {
        let c = polygon_vertex_centroid(polygon);
        let n = polygon.len();
        (0..n)
            .map(|i| monomial_over_triangle(c, polygon[i], polygon[(i + 1) % n], p, q))
            .sum()
    }

    #[test]
    fn gauss_nodes_integrate_polynomials() {
        for n in 1..=8usize {
            let (x, w) = gauss_legendre_unit(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            // exact through degree 2n - 1
            for d in 0..(2 * n) {
                let num: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(d as i32)).sum();
                let exact = 1.0 / (d as f64 + 1.0);
                assert!((num - exact).abs() < 1e-13, "n={n} degree={d}: {num} vs {exact}");
            }
        }
    }

    #[test]
    fn clipped_triangle_area() {
        let poly = [Point2::new(0.0, 0.0), Point2::new(0.5, 0.0), Point2::new(0.0, 0.5)];
        let rule = volume_rule(&poly, 2, 1.0);
        assert!((rule.total_weight() - 0.125).abs() < 1e-14);
    }

    #[test]
    fn moment_x_over_reference_triangle() {
        let poly = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let rule = volume_rule(&poly, 2, 1.0);
        let integral = rule.integrate(|p| p.x);
        assert!((integral - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn x2y2_over_unit_square() {
        let poly = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let rule = volume_rule(&poly, 4, 1.0);
        let integral = rule.integrate(|p| p.x * p.x * p.y * p.y);
        assert!((integral - 1.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn degenerate_polygon_gives_empty_rule() {
        let sliver = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1e-16),
        ];
        assert!(volume_rule(&sliver, 2, 1.0).is_empty());
    }

    #[test]
    fn line_rules() {
        let r = line_rule(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 1);
        assert!((r.total_weight() - 1.0).abs() < 1e-14);
        let r3 = line_rule(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 3);
        let integral = r3.integrate(|p| p.x.powi(3));
        assert!((integral - 0.25).abs() < 1e-14);
        let ry = line_rule(Point2::new(0.0, 0.0), Point2::new(0.0, 2.0), 1);
        assert!((ry.integrate(|p| p.y) - 2.0).abs() < 1e-13);
        assert!(line_rule(Point2::new(1.0, 1.0), Point2::new(1.0, 1.0), 3).is_empty());
    }

    #[test]
    fn face_rule_weight_sum() {
        let r = face_rule(Point2::new(0.5, 0.25), Point2::new(0.5, 0.5), 3);
        assert!((r.total_weight() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn monomials_exact_on_random_clipped_polygons() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240811);
        for _ in 0..20 {
            // random convex polygon: sorted angles on a wobbly circle
            let nv = rng.random_range(3..=6);
            let mut angles: Vec<f64> = (0..nv)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let poly: Vec<Point2> = angles
                .iter()
                .map(|&t| Point2::new(0.5 + 0.4 * t.cos(), 0.5 + 0.4 * t.sin()))
                .collect();
            if polygon_area(&poly) < 1e-3 {
                continue;
            }
            for k in 1..=4i32 {
                let rule = volume_rule(&poly, 2 * k, 1.0);
                for p in 0..=(2 * k as u32) {
                    for q in 0..=(2 * k as u32 - p) {
                        let num = rule.integrate(|pt| pt.x.powi(p as i32) * pt.y.powi(q as i32));
                        let exact = monomial_over_polygon(&poly, p, q);
                        assert!(
                            (num - exact).abs() < 1e-10,
                            "k={k} x^{p} y^{q}: {num} vs {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn chord_split_additivity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let square = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        for _ in 0..10 {
            // chord across the square: x = c line
            let c = rng.random_range(0.2..0.8);
            let left = [
                Point2::new(0.0, 0.0),
                Point2::new(c, 0.0),
                Point2::new(c, 1.0),
                Point2::new(0.0, 1.0),
            ];
            let right = [
                Point2::new(c, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(c, 1.0),
            ];
            let f = |p: Point2| 1.0 + p.x * p.y + p.x.powi(3) - 2.0 * p.y.powi(2);
            let whole = volume_rule(&square, 4, 1.0).integrate(f);
            let split = volume_rule(&left, 4, 1.0).integrate(f)
                + volume_rule(&right, 4, 1.0).integrate(f);
            assert!((whole - split).abs() < 1e-12, "{whole} vs {split}");
        }
    }
}
