//! Model problem presets: cantilever beam and L-shape beam under traction.
//!
//! Domains, boundary designations and material data follow the benchmark
//! setups; the initial hole layouts are regular arrays of circles
//! reconstructed from the published drawings (the originals are given only
//! pictorially), kept clear of supports and loads.

use crate::elasticity::ElasticMaterial;
use crate::geometry::{Point2, Segment};
use crate::levelset::{BoundarySpec, Hole, LoadSegment};
use crate::mesh::{DesignDomain, Rect};
use nalgebra::Vector2;

/// Traction density shared by both model problems, N/m.
pub const TRACTION: Vector2<f64> = Vector2::new(0.0, -20.0);
/// Material cost weight of the objective.
pub const KAPPA: f64 = 35.0;

#[derive(Debug, Clone)]
pub struct ModelProblem {
    pub domain: DesignDomain,
    pub boundary: BoundarySpec,
    pub holes: Vec<Hole>,
    pub material: ElasticMaterial,
    pub kappa: f64,
}

fn benchmark_material() -> ElasticMaterial {
    ElasticMaterial::new(1e4, 0.3).expect("benchmark material constants")
}

/// Cantilever beam: 2 m x 1 m rectangle, clamped along the whole left edge,
/// loaded on the right edge within +-0.1 m of the center line.
pub fn cantilever() -> ModelProblem {
    let domain = DesignDomain::rectangle(2.0, 1.0);
    let boundary = BoundarySpec {
        dirichlet: vec![Segment::new(0.0, 0.0, 0.0, 1.0)],
        loads: vec![LoadSegment {
            segment: Segment::new(2.0, 0.4, 2.0, 0.6),
            traction: TRACTION,
        }],
    };
    // two rows of circles, symmetric about the horizontal center line;
    // gaps between circles stay above 0.3 m so the equidistant ridges of
    // the initial signed distance lie well away from the hole boundaries
    let mut holes = Vec::new();
    let r = 0.125;
    for x in [0.4, 1.0, 1.6] {
        holes.push(Hole { center: Point2::new(x, 0.25), radius: r });
        holes.push(Hole { center: Point2::new(x, 0.75), radius: r });
    }
    ModelProblem { domain, boundary, holes, material: benchmark_material(), kappa: KAPPA }
}

/// L-shape beam: 2 m x 2 m square minus the 1 m x 1 m top-right void,
/// clamped along the top edge of the standing arm, loaded on the right edge
/// over [5/16, 1/2] m from the bottom.
pub fn l_shape() -> ModelProblem {
    let domain = DesignDomain::with_void(2.0, 2.0, Rect::new(1.0, 1.0, 2.0, 2.0));
    let boundary = BoundarySpec {
        dirichlet: vec![Segment::new(0.0, 2.0, 1.0, 2.0)],
        loads: vec![LoadSegment {
            segment: Segment::new(2.0, 5.0 / 16.0, 2.0, 0.5),
            traction: TRACTION,
        }],
    };
    let mut holes = Vec::new();
    let r = 0.125;
    // bottom arm
    for x in [0.4, 1.0, 1.6] {
        holes.push(Hole { center: Point2::new(x, 0.25), radius: r });
        holes.push(Hole { center: Point2::new(x, 0.75), radius: r });
    }
    // standing arm
    for y in [1.25, 1.75] {
        holes.push(Hole { center: Point2::new(0.5, y), radius: r });
    }
    ModelProblem { domain, boundary, holes, material: benchmark_material(), kappa: KAPPA }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantilever_preset_data() {
        let p = cantilever();
        assert_eq!(p.domain, DesignDomain::rectangle(2.0, 1.0));
        assert_eq!(p.boundary.dirichlet, vec![Segment::new(0.0, 0.0, 0.0, 1.0)]);
        let load = &p.boundary.loads[0];
        assert_eq!(load.traction, Vector2::new(0.0, -20.0));
        assert!((load.segment.a.y - 0.4).abs() < 1e-15 && (load.segment.b.y - 0.6).abs() < 1e-15);
        assert!((p.kappa - 35.0).abs() < 1e-15);
        assert!((p.material.e - 1e4).abs() < 1e-9 && (p.material.nu - 0.3).abs() < 1e-15);
        // symmetric hole layout, holes clear of the support and the load
        for hole in &p.holes {
            let mirrored = Point2::new(hole.center.x, 1.0 - hole.center.y);
            assert!(p
                .holes
                .iter()
                .any(|h| (h.center - mirrored).norm() < 1e-12 && h.radius == hole.radius));
            assert!(hole.center.x - hole.radius > 0.05);
            assert!(2.0 - hole.center.x - hole.radius > 0.05);
        }
    }

    #[test]
    fn l_shape_preset_data() {
        let p = l_shape();
        assert_eq!(p.domain.void, Some(Rect::new(1.0, 1.0, 2.0, 2.0)));
        let load = &p.boundary.loads[0];
        assert!((load.segment.a.y - 5.0 / 16.0).abs() < 1e-15);
        assert!((load.segment.b.y - 0.5).abs() < 1e-15);
        // all holes inside the L with margin
        for hole in &p.holes {
            let c = hole.center;
            let in_l = (c.x < 1.0 || c.y < 1.0)
                && c.x > 0.0
                && c.y > 0.0
                && c.x < 2.0
                && c.y < 2.0;
            assert!(in_l, "hole center {c:?} outside the L");
            if c.y > 1.0 {
                assert!(c.x + hole.radius < 1.0 - 0.05, "hole leaks into the void");
            }
        }
    }
}
