//! Benchmarks of the element-parallel kernels against their sequential
//! fallbacks: cut classification + geometry extraction, stiffness assembly,
//! and the shape-derivative accumulation.
//!
//! Build with the default `parallel` feature to compare both paths; without
//! it only the sequential path exists.

use criterion::{criterion_group, criterion_main, Criterion};
use levelcut::elasticity::{
    assemble_bulk, assemble_system, solve, ElasticMaterial, FESpace, StabilizationParams,
};
use levelcut::levelset::{classify, extract_geometry, init_levelset, Hole};
use levelcut::mesh::{build_background_mesh, refine_uniform, ElementKind};
use levelcut::parallel::Parallelism;
use levelcut::problems::cantilever;
use levelcut::shapeopt::shape_derivative;
use std::hint::black_box;
use std::sync::Arc;

struct Fixture {
    phi: levelcut::levelset::LevelSetField,
    boundary: levelcut::levelset::BoundarySpec,
    material: ElasticMaterial,
    classification: levelcut::levelset::DomainClassification,
    cutgeom: levelcut::levelset::CutGeometry,
    space: Arc<FESpace>,
    u: levelcut::elasticity::DisplacementField,
}

fn fixture(h: f64, k: usize) -> Fixture {
    let problem = cantilever();
    let m = build_background_mesh(&problem.domain, h, ElementKind::Quadrilateral).unwrap();
    let mesh = refine_uniform(m, k).unwrap();
    let mut holes = problem.holes.clone();
    holes.push(Hole { center: levelcut::geometry::Point2::new(0.7, 0.5), radius: 0.1 });
    let phi = init_levelset(&mesh, &holes);
    let classification = classify(&phi, &problem.boundary, Parallelism::Sequential).unwrap();
    let cutgeom = extract_geometry(&phi, Parallelism::Sequential);
    let space = Arc::new(FESpace::new(mesh, &classification));
    let params = StabilizationParams::defaults(k, &problem.material);
    let system = assemble_system(
        &space,
        &problem.material,
        &cutgeom,
        &classification,
        &problem.boundary,
        &params,
        Parallelism::Sequential,
    );
    let u = solve(&system, space.clone()).unwrap();
    Fixture {
        phi,
        boundary: problem.boundary,
        material: problem.material,
        classification,
        cutgeom,
        space,
        u,
    }
}

fn modes() -> Vec<(&'static str, Parallelism)> {
    let mut modes = vec![("seq", Parallelism::Sequential)];
    #[cfg(feature = "parallel")]
    modes.push(("rayon", Parallelism::Rayon));
    modes
}

fn bench_classify_extract(c: &mut Criterion) {
    let fx = fixture(0.025, 2);
    let mut group = c.benchmark_group("classify_extract");
    for (name, par) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let class = classify(black_box(&fx.phi), &fx.boundary, par).unwrap();
                let cut = extract_geometry(black_box(&fx.phi), par);
                black_box((class.active_elements.len(), cut.material_area()))
            })
        });
    }
    group.finish();
}

fn bench_assemble_bulk(c: &mut Criterion) {
    let fx = fixture(0.025, 2);
    let mut group = c.benchmark_group("assemble_bulk");
    for (name, par) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let triplets = assemble_bulk(
                    black_box(&fx.space),
                    &fx.material,
                    &fx.cutgeom,
                    &fx.classification,
                    par,
                );
                black_box(triplets.dim())
            })
        });
    }
    group.finish();
}

fn bench_shape_derivative(c: &mut Criterion) {
    let fx = fixture(0.025, 2);
    let mut group = c.benchmark_group("shape_derivative");
    for (name, par) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let dj = shape_derivative(black_box(&fx.u), &fx.material, 35.0, &fx.cutgeom, par);
                black_box(dj.values.len())
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_classify_extract,
    bench_assemble_bulk,
    bench_shape_derivative
);
criterion_main!(benches);
