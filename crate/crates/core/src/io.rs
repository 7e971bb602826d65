//! Output writers: legacy VTK unstructured grids for fields, SVG outlines
//! of the extracted boundary, and the iteration log CSV row format.

use crate::elasticity::{von_mises, DisplacementField, ElasticMaterial};
use crate::levelset::{CutGeometry, LevelSetField};
use crate::mesh::{BackgroundMesh, ElementKind};
use crate::shapeopt::IterationRecord;
use std::io::{self, BufWriter, Write};
use std::path::Path;

fn vtk_mesh_header(out: &mut impl Write, mesh: &BackgroundMesh, title: &str) -> io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.n_vertices())?;
    for p in &mesh.vertices {
        writeln!(out, "{:.12e} {:.12e} 0.0", p.x, p.y)?;
    }
    let nv = mesh.kind.vertices_per_element();
    writeln!(out, "CELLS {} {}", mesh.n_elements(), mesh.n_elements() * (nv + 1))?;
    for e in 0..mesh.n_elements() {
        write!(out, "{nv}")?;
        for &v in mesh.element_vertices(e) {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    let cell_type = match mesh.kind {
        ElementKind::Triangle => 5,
        ElementKind::Quadrilateral => 9,
    };
    writeln!(out, "CELL_TYPES {}", mesh.n_elements())?;
    for _ in 0..mesh.n_elements() {
        writeln!(out, "{cell_type}")?;
    }
    Ok(())
}

/// Bare mesh dump for debugging.
pub fn write_vtk_mesh(path: &Path, mesh: &BackgroundMesh) -> io::Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    vtk_mesh_header(&mut out, mesh, "background mesh")?;
    out.flush()
}

/// Writes the level-set as point data on the fine mesh.
pub fn write_vtk_levelset(path: &Path, phi: &LevelSetField) -> io::Result<()> {
    let fine = &phi.mesh.fine;
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    vtk_mesh_header(&mut out, fine, "level set")?;
    writeln!(out, "POINT_DATA {}", fine.n_vertices())?;
    writeln!(out, "SCALARS phi double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in &phi.values {
        writeln!(out, "{v:.12e}")?;
    }
    out.flush()
}

/// Writes displacement vectors (zero off the active mesh) and von Mises
/// stress per fine cell on the fine mesh.
pub fn write_vtk_solution(
    path: &Path,
    u: &DisplacementField,
    material: &ElasticMaterial,
) -> io::Result<()> {
    let mesh = &u.space.mesh;
    let fine = &mesh.fine;
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    vtk_mesh_header(&mut out, fine, "displacement and von Mises stress")?;
    writeln!(out, "POINT_DATA {}", fine.n_vertices())?;
    writeln!(out, "VECTORS displacement double")?;
    for v in 0..fine.n_vertices() {
        let d = u.at_vertex(v);
        writeln!(out, "{:.12e} {:.12e} 0.0", d.x, d.y)?;
    }
    writeln!(out, "CELL_DATA {}", fine.n_elements())?;
    writeln!(out, "SCALARS von_mises double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for f in 0..fine.n_elements() {
        let e = mesh.parent[f];
        let value = if u.space.is_active[e] {
            let origin = fine.element_origin(f);
            let centroid = match fine.kind {
                ElementKind::Quadrilateral => {
                    origin + crate::geometry::Point2::new(0.5 * fine.h, 0.5 * fine.h)
                }
                ElementKind::Triangle => {
                    let pts = fine.element_polygon(f);
                    crate::geometry::polygon_vertex_centroid(&pts)
                }
            };
            von_mises(u, material, e, centroid)
        } else {
            0.0
        };
        writeln!(out, "{value:.12e}")?;
    }
    out.flush()
}

/// Writes the extracted boundary over a light background grid as SVG.
pub fn write_svg_boundary(path: &Path, cutgeom: &CutGeometry) -> io::Result<()> {
    let mesh = &cutgeom.mesh;
    let coarse = &mesh.coarse;
    let (w, h) = (coarse.domain.width, coarse.domain.height);
    let stroke = 0.2 * coarse.h;
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="800">"#
    )?;
    // flip y so the domain is drawn with the origin at the bottom left
    writeln!(out, r#"<g transform="translate(0,{h}) scale(1,-1)">"#)?;
    writeln!(
        out,
        r##"<g stroke="#cccccc" stroke-width="{:.6}" fill="none">"##,
        0.25 * stroke
    )?;
    for face in coarse
        .interior_faces
        .iter()
        .map(|f| f.vertices)
        .chain(coarse.boundary_faces.iter().map(|f| f.vertices))
    {
        let a = coarse.vertices[face[0]];
        let b = coarse.vertices[face[1]];
        writeln!(
            out,
            r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"/>"#,
            a.x, a.y, b.x, b.y
        )?;
    }
    writeln!(out, "</g>")?;
    writeln!(
        out,
        r##"<g stroke="#000000" stroke-width="{stroke:.6}" fill="none" stroke-linecap="round">"##
    )?;
    for seg in cutgeom.all_segments() {
        writeln!(
            out,
            r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"/>"#,
            seg.a.x, seg.a.y, seg.b.x, seg.b.y
        )?;
    }
    writeln!(out, "</g>")?;
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")?;
    out.flush()
}

pub const CSV_HEADER: &str = "iter,t,T,J,compliance,volume,accepted,components";

pub fn csv_row(r: &IterationRecord) -> String {
    format!(
        "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{}",
        r.iteration,
        r.t,
        r.step,
        r.objective,
        r.compliance,
        r.volume,
        if r.accepted { 1 } else { 0 },
        r.components
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::{classify, extract_geometry, init_levelset, BoundarySpec, Hole};
    use crate::mesh::{build_background_mesh, refine_uniform, DesignDomain};
    use crate::parallel::Parallelism;

    #[test]
    fn vtk_and_svg_outputs_are_wellformed() {
        let m = build_background_mesh(
            &DesignDomain::rectangle(1.0, 1.0),
            0.25,
            ElementKind::Quadrilateral,
        )
        .unwrap();
        let mesh = refine_uniform(m, 2).unwrap();
        let phi = init_levelset(
            &mesh,
            &[Hole { center: crate::geometry::Point2::new(0.5, 0.5), radius: 0.2 }],
        );
        let classification = classify(&phi, &BoundarySpec::default(), Parallelism::Sequential).unwrap();
        let cutgeom = extract_geometry(&phi, Parallelism::Sequential);
        let space = std::sync::Arc::new(crate::elasticity::FESpace::new(
            mesh.clone(),
            &classification,
        ));
        let u = DisplacementField::zero(space);
        let material = ElasticMaterial::new(1e4, 0.3).unwrap();

        let dir = std::env::temp_dir().join("levelcut-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let mesh_path = dir.join("mesh.vtk");
        write_vtk_mesh(&mesh_path, &mesh.coarse).unwrap();
        let text = std::fs::read_to_string(&mesh_path).unwrap();
        assert!(text.contains("CELL_TYPES 16"));
        let phi_path = dir.join("phi.vtk");
        write_vtk_levelset(&phi_path, &phi).unwrap();
        let text = std::fs::read_to_string(&phi_path).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0"));
        assert!(text.contains("SCALARS phi double 1"));
        assert_eq!(
            text.lines().filter(|l| l.starts_with("9 ")).count(),
            0,
            "cell connectivity lines start with the vertex count 4"
        );

        let sol_path = dir.join("solution.vtk");
        write_vtk_solution(&sol_path, &u, &material).unwrap();
        let text = std::fs::read_to_string(&sol_path).unwrap();
        assert!(text.contains("VECTORS displacement double"));
        assert!(text.contains("SCALARS von_mises double 1"));

        let svg_path = dir.join("boundary.svg");
        write_svg_boundary(&svg_path, &cutgeom).unwrap();
        let text = std::fs::read_to_string(&svg_path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.matches("<line").count() > 20);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_row_format() {
        let rec = IterationRecord {
            iteration: 3,
            t: 0.25,
            step: 0.125,
            objective: 50.0,
            compliance: 1.5,
            volume: 1.4,
            accepted: true,
            components: 2,
            components_kept: 1,
            holes: 4,
        };
        let row = csv_row(&rec);
        assert!(row.starts_with("3,"));
        assert!(row.ends_with(",1,2"));
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
    }
}
