//! TOML run configuration and its resolution into solver inputs.

use anyhow::{anyhow, bail, Context};
use levelcut::elasticity::{ElasticMaterial, StabilizationParams};
use levelcut::geometry::{Point2, Segment};
use levelcut::levelset::{BoundarySpec, Hole, LoadSegment};
use levelcut::mesh::{
    build_background_mesh, refine_uniform, DesignDomain, ElementKind, Rect, RefinedMesh,
};
use levelcut::problems;
use levelcut::shapeopt::OptimizeParams;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// cantilever | lshape | custom
    pub problem: String,
    /// quad | triangle
    #[serde(default = "default_kind")]
    pub element_kind: String,
    pub k: usize,
    pub h: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub material: Option<MaterialConfig>,
    pub kappa: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub gamma_d: Option<f64>,
    pub gamma_j: Option<f64>,
    pub t0: Option<f64>,
    /// overrides the preset initial design
    pub holes: Option<Vec<HoleConfig>>,
    pub custom: Option<CustomProblem>,
    /// run the element loops sequentially
    #[serde(default)]
    pub sequential: bool,
}

fn default_kind() -> String {
    "quad".into()
}
fn default_iterations() -> usize {
    50
}
fn default_snapshot_every() -> usize {
    10
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub e: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    pub width: f64,
    pub height: f64,
    /// void rectangle as [x0, y0, x1, y1]
    pub void: Option<[f64; 4]>,
    /// Dirichlet segments as [x1, y1, x2, y2]
    pub dirichlet: Vec<[f64; 4]>,
    pub loads: Vec<LoadConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    pub segment: [f64; 4],
    pub traction: [f64; 2],
}

/// Everything needed to run, with defaults resolved.
pub struct Resolved {
    pub mesh: Arc<RefinedMesh>,
    pub boundary: BoundarySpec,
    pub holes: Vec<Hole>,
    pub params: OptimizeParams,
    pub max_iterations: usize,
    pub snapshot_every: usize,
    pub out_dir: PathBuf,
}

pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

pub fn resolve(config: &RunConfig) -> anyhow::Result<Resolved> {
    if config.k < 1 {
        bail!("field `k`: polynomial degree must be at least 1, got {}", config.k);
    }
    if !(config.h > 0.0) {
        bail!("field `h`: mesh size must be positive, got {}", config.h);
    }
    let kind = match config.element_kind.as_str() {
        "quad" | "quadrilateral" => ElementKind::Quadrilateral,
        "triangle" | "tri" => ElementKind::Triangle,
        other => bail!("field `element_kind`: expected `quad` or `triangle`, got `{other}`"),
    };

    let (domain, boundary, preset_holes, preset_material, preset_kappa) =
        match config.problem.as_str() {
            "cantilever" => {
                let p = problems::cantilever();
                (p.domain, p.boundary, p.holes, p.material, p.kappa)
            }
            "lshape" | "l-shape" => {
                let p = problems::l_shape();
                (p.domain, p.boundary, p.holes, p.material, p.kappa)
            }
            "custom" => {
                let custom = config
                    .custom
                    .as_ref()
                    .ok_or_else(|| anyhow!("field `custom`: required when problem = \"custom\""))?;
                let domain = match custom.void {
                    Some([x0, y0, x1, y1]) => DesignDomain::with_void(
                        custom.width,
                        custom.height,
                        Rect::new(x0, y0, x1, y1),
                    ),
                    None => DesignDomain::rectangle(custom.width, custom.height),
                };
                if custom.dirichlet.is_empty() {
                    bail!("field `custom.dirichlet`: at least one segment is required");
                }
                let boundary = BoundarySpec {
                    dirichlet: custom
                        .dirichlet
                        .iter()
                        .map(|&[a, b, c, d]| Segment::new(a, b, c, d))
                        .collect(),
                    loads: custom
                        .loads
                        .iter()
                        .map(|l| LoadSegment {
                            segment: Segment::new(
                                l.segment[0],
                                l.segment[1],
                                l.segment[2],
                                l.segment[3],
                            ),
                            traction: Point2::new(l.traction[0], l.traction[1]),
                        })
                        .collect(),
                };
                let material = ElasticMaterial::new(1e4, 0.3).expect("default material");
                (domain, boundary, Vec::new(), material, problems::KAPPA)
            }
            other => bail!(
                "field `problem`: expected `cantilever`, `lshape` or `custom`, got `{other}`"
            ),
        };

    let material = match config.material {
        Some(MaterialConfig { e, nu }) => ElasticMaterial::new(e, nu)
            .map_err(|err| anyhow!("field `material`: {err}"))?,
        None => preset_material,
    };
    let kappa = config.kappa.unwrap_or(preset_kappa);
    if !(kappa >= 0.0) {
        bail!("field `kappa`: material cost must be nonnegative, got {kappa}");
    }

    let coarse = build_background_mesh(&domain, config.h, kind)
        .map_err(|err| anyhow!("field `h`: {err}"))?;
    let mesh = refine_uniform(coarse, config.k).map_err(|err| anyhow!("field `k`: {err}"))?;

    let holes = match &config.holes {
        Some(holes) => holes
            .iter()
            .map(|h| Hole { center: Point2::new(h.center[0], h.center[1]), radius: h.radius })
            .collect(),
        None => preset_holes,
    };

    let mut params = OptimizeParams::new(material, kappa, &mesh);
    params.max_iterations = config.max_iterations;
    if let Some(c1) = config.c1 {
        if !(c1 > 0.0) {
            bail!("field `c1`: must be positive, got {c1}");
        }
        params.c1 = c1;
    }
    if let Some(c2) = config.c2 {
        if !(c2 >= 0.0) {
            bail!("field `c2`: must be nonnegative, got {c2}");
        }
        params.c2 = c2;
    }
    if let Some(gd) = config.gamma_d {
        if !(gd > 0.0) {
            bail!("field `gamma_d`: must be positive, got {gd}");
        }
        params.stabilization.gamma_d = gd;
    }
    if let Some(gj) = config.gamma_j {
        if !(gj >= 0.0) {
            bail!("field `gamma_j`: must be nonnegative, got {gj}");
        }
        params.stabilization.gamma_j = vec![gj; config.k];
    }
    if let Some(t0) = config.t0 {
        if !(t0 > 0.0) {
            bail!("field `t0`: must be positive, got {t0}");
        }
        params.t0 = t0;
    }
    if config.sequential {
        params.parallelism = levelcut::parallel::Parallelism::Sequential;
    }

    Ok(Resolved {
        mesh,
        boundary,
        holes,
        params,
        max_iterations: config.max_iterations,
        snapshot_every: config.snapshot_every,
        out_dir: config.out_dir.clone(),
    })
}

/// Pretty-prints the resolved parameter set (the `validate` output).
pub fn describe(config: &RunConfig, resolved: &Resolved) -> String {
    let m = &resolved.params.material;
    let hf = resolved.mesh.fine_spacing();
    let defaults = StabilizationParams::defaults(config.k, m);
    let mut out = String::new();
    out.push_str(&format!(
        "problem            {}\nelement kind       {:?}\nk                  {}\nh                  {}\nlevel-set spacing  {hf}\n",
        config.problem, resolved.mesh.coarse.kind, config.k, config.h
    ));
    out.push_str(&format!(
        "elements           {} coarse, {} fine\n",
        resolved.mesh.coarse.n_elements(),
        resolved.mesh.fine.n_elements()
    ));
    out.push_str(&format!(
        "material           E = {}, nu = {}, mu = {:.6e}, lambda = {:.6e}\n",
        m.e, m.nu, m.mu, m.lambda
    ));
    out.push_str(&format!("kappa              {}\n", resolved.params.kappa));
    out.push_str(&format!(
        "c1                 {:.6e}{}\n",
        resolved.params.c1,
        if config.c1.is_none() { "  (default 3 (h/k)^2)" } else { "" }
    ));
    out.push_str(&format!(
        "c2                 {}{}\n",
        resolved.params.c2,
        if config.c2.is_none() { "  (default)" } else { "" }
    ));
    out.push_str(&format!(
        "gamma_D            {:.6e}{}\n",
        resolved.params.stabilization.gamma_d,
        if config.gamma_d.is_none() {
            "  (default 10 k^2 (mu + lambda))"
        } else {
            ""
        }
    ));
    out.push_str(&format!(
        "gamma_j            {:.6e}{}\n",
        resolved.params.stabilization.gamma_j[0],
        if config.gamma_j.is_none() {
            "  (default 1e-7 (mu + lambda))"
        } else {
            ""
        }
    ));
    let _ = defaults;
    out.push_str(&format!(
        "T0                 {:.6e}{}\n",
        resolved.params.t0,
        if config.t0.is_none() { "  (default 0.05 diam)" } else { "" }
    ));
    out.push_str(&format!(
        "initial holes      {}\nmax iterations     {}\nsnapshot every     {}\nout dir            {}\n",
        resolved.holes.len(),
        resolved.max_iterations,
        resolved.snapshot_every,
        resolved.out_dir.display()
    ));
    out
}
