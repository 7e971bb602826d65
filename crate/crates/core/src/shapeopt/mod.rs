//! The shape optimization loop: descent velocity from the shape derivative,
//! level-set transport with an accept/double, reject/halve line search on
//! the objective, connectivity filtering and reinitialization.
//!
//! Each trial pipeline is transport -> non-design clamp -> connectivity
//! filter -> reinitialize -> solve, and a trial is accepted only when the
//! objective of the resulting state is below the current one, so the
//! sequence of accepted objective values is strictly decreasing by
//! construction. Filtering runs inside the trial because floating material
//! would make the trial solve singular. On acceptance the next trial step
//! doubles; on rejection it halves until it underflows.

mod derivative;
mod filter;
mod transport;
mod velocity;

pub use derivative::{field_coefficients, shape_derivative, ShapeDerivative};
pub use filter::{filter_disconnected, FilterReport};
pub use transport::{cfl_substeps, transport};
pub use velocity::{velocity, VelocityField};

use crate::elasticity::{
    assemble_system, objective, solve, DisplacementField, ElasticMaterial, FESpace, Objective,
    StabilizationParams,
};
use crate::levelset::{
    classify, extract_geometry, reinitialize, BoundarySpec, CutGeometry, DomainClassification,
    LevelSetField,
};
use crate::linsolve::SolveError;
use crate::parallel::Parallelism;
use crate::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct OptimizeParams {
    pub material: ElasticMaterial,
    pub kappa: f64,
    /// velocity regularization weight
    pub c1: f64,
    /// transport stabilization weight
    pub c2: f64,
    pub stabilization: StabilizationParams,
    /// initial trial pseudo-time step
    pub t0: f64,
    /// convergence when the step falls below `t_min_factor * t0`
    pub t_min_factor: f64,
    pub max_iterations: usize,
    pub reinit_max_iters: usize,
    pub reinit_tol: f64,
    /// width of the protected material band at supports and loads, in fine
    /// spacings; zero disables the clamp
    pub nondesign_band: f64,
    /// cap on the boundary sweep per iteration, in fine spacings; keeps the
    /// evolution at the geometry resolution even while the step doubles
    pub max_sweep_cells: f64,
    pub parallelism: Parallelism,
}

impl OptimizeParams {
    /// Parameter defaults: c1 = 3 (h/k)^2, c2 = 0.1, the stabilization
    /// defaults for the material, and an initial step of 5% of the domain
    /// diameter.
    pub fn new(material: ElasticMaterial, kappa: f64, mesh: &crate::mesh::RefinedMesh) -> Self {
        let hf = mesh.fine_spacing();
        OptimizeParams {
            material,
            kappa,
            c1: 3.0 * hf * hf,
            c2: 0.1,
            stabilization: StabilizationParams::defaults(mesh.k, &material),
            t0: 0.05 * mesh.coarse.domain.diameter(),
            t_min_factor: 1e-6,
            max_iterations: 50,
            reinit_max_iters: 50,
            reinit_tol: 1e-3,
            nondesign_band: 2.0,
            max_sweep_cells: 4.0,
            parallelism: Parallelism::default(),
        }
    }
}

/// One line-search trial (accepted or rejected).
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub iteration: usize,
    /// accumulated pseudo-time of the accepted state
    pub t: f64,
    /// trial step used
    pub step: f64,
    pub objective: f64,
    pub compliance: f64,
    pub volume: f64,
    pub accepted: bool,
    /// material components before filtering
    pub components: usize,
    pub components_kept: usize,
    pub holes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIterations,
    /// the descent velocity vanished
    StationaryPoint,
    /// the line search step underflowed
    StepUnderflow,
}

#[derive(Debug, Clone)]
pub struct OptimizationState {
    pub t: f64,
    pub step: f64,
    pub accepted_iterations: usize,
    pub history: Vec<IterationRecord>,
    pub stop: StopReason,
}

/// View of an accepted state handed to the observer.
pub struct Snapshot<'a> {
    pub iteration: usize,
    pub phi: &'a LevelSetField,
    pub displacement: &'a DisplacementField,
    pub cutgeom: &'a CutGeometry,
    pub classification: &'a DomainClassification,
    pub objective: Objective,
}

struct Evaluated {
    phi: LevelSetField,
    classification: DomainClassification,
    cutgeom: CutGeometry,
    u: DisplacementField,
    objective: Objective,
    filter: FilterReport,
}

fn clamp_nondesign(phi: &mut LevelSetField, boundary: &BoundarySpec, band: f64) {
    if band <= 0.0 {
        return;
    }
    let fine = &phi.mesh.fine;
    let reach = band * fine.h;
    let floor = 0.5 * reach;
    let mut protected: Vec<&crate::geometry::Segment> =
        boundary.dirichlet.iter().collect();
    protected.extend(boundary.loads.iter().map(|l| &l.segment));
    for (v, &p) in fine.vertices.iter().enumerate() {
        if protected.iter().any(|s| s.distance(p) <= reach) {
            phi.values[v] = phi.values[v].max(floor);
        }
    }
}

/// A failed trial the line search may retry with a smaller step, as opposed
/// to a hard error. Singular or numerically hopeless systems come from
/// degenerate trial geometry, which a smaller step repairs.
fn is_recoverable(err: &Error) -> bool {
    matches!(
        err,
        Error::DegenerateDomain(_)
            | Error::DetachedFromDirichlet
            | Error::Solve(SolveError::Singular { .. })
            | Error::Solve(SolveError::ResidualTooLarge { .. })
    )
}

fn evaluate(
    mut phi: LevelSetField,
    boundary: &BoundarySpec,
    params: &OptimizeParams,
) -> Result<Evaluated> {
    let par = params.parallelism;
    clamp_nondesign(&mut phi, boundary, params.nondesign_band);
    let mut phi = reinitialize(&phi, params.reinit_max_iters, params.reinit_tol)?;
    // reinitialization may pull the zero set into the protected band;
    // re-assert it so supports and loads keep material
    clamp_nondesign(&mut phi, boundary, params.nondesign_band);
    // connectivity filtering runs last: nothing may resurrect material that
    // was cut loose, or the solve sees floating pieces
    let (phi, filter) = filter_disconnected(&phi, boundary)?;
    let classification = classify(&phi, boundary, par)?;
    let cutgeom = extract_geometry(&phi, par);
    let space = Arc::new(FESpace::new(phi.mesh.clone(), &classification));
    // a load segment without active coverage would silently drop traction
    // and fake an objective decrease
    let (_, _, skipped_loads) = crate::elasticity::boundary_segments(&space, boundary);
    if skipped_loads > 0 {
        return Err(Error::DegenerateDomain(" under a loaded segment"));
    }
    let system = assemble_system(
        &space,
        &params.material,
        &cutgeom,
        &classification,
        boundary,
        &params.stabilization,
        par,
    );
    let u = solve(&system, space)?;
    // a quasi-floating piece moves near-rigidly with huge amplitude while
    // carrying almost no strain energy, which would fake a low objective;
    // linear elasticity displacements beyond the domain scale mean the
    // trial geometry is a mechanism
    let max_u = u.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !max_u.is_finite() || max_u > phi.mesh.coarse.domain.diameter() {
        return Err(Error::DegenerateDomain(" (mechanism with unbounded displacement)"));
    }
    let objective = objective(&u, &params.material, &cutgeom, &classification, params.kappa, par);
    Ok(Evaluated { phi, classification, cutgeom, u, objective, filter })
}

/// Runs the optimization from the initial level-set. The observer receives
/// every trial record, with a snapshot of the state for accepted ones.
pub fn optimize(
    phi0: &LevelSetField,
    boundary: &BoundarySpec,
    params: &OptimizeParams,
    observer: &mut dyn FnMut(&IterationRecord, Option<Snapshot>),
) -> Result<(LevelSetField, OptimizationState)> {
    if boundary.dirichlet.is_empty() {
        return Err(Error::InvalidParameter(
            "optimization requires a Dirichlet boundary".into(),
        ));
    }
    let hf = phi0.mesh.fine_spacing();
    let mut current = evaluate(phi0.clone(), boundary, params)?;
    let mut history = Vec::new();
    let mut t = 0.0;
    let mut step = params.t0;
    let t_min = params.t_min_factor * params.t0;
    let mut accepted = 0usize;

    let record = |ev: &Evaluated, iteration: usize, t: f64, step: f64, accepted: bool| {
        IterationRecord {
            iteration,
            t,
            step,
            objective: ev.objective.j,
            compliance: ev.objective.compliance,
            volume: ev.objective.volume,
            accepted,
            components: ev.filter.components_before,
            components_kept: ev.filter.components_kept,
            holes: ev.filter.holes,
        }
    };

    let initial = record(&current, 0, 0.0, step, true);
    history.push(initial);
    observer(
        &initial,
        Some(Snapshot {
            iteration: 0,
            phi: &current.phi,
            displacement: &current.u,
            cutgeom: &current.cutgeom,
            classification: &current.classification,
            objective: current.objective,
        }),
    );

    let mut stop = StopReason::MaxIterations;
    'outer: for iteration in 1..=params.max_iterations {
        let dj = shape_derivative(
            &current.u,
            &params.material,
            params.kappa,
            &current.cutgeom,
            params.parallelism,
        );
        let beta = match velocity(&dj, params.c1, &phi_mesh(&current.phi))? {
            Some(beta) => beta,
            None => {
                stop = StopReason::StationaryPoint;
                break 'outer;
            }
        };
        let max_speed = beta.max_speed();
        if params.max_sweep_cells > 0.0 && max_speed > 0.0 {
            step = step.min(params.max_sweep_cells * hf / max_speed);
        }

        loop {
            let substeps = cfl_substeps(step, max_speed, hf);
            let trial_phi = transport(&current.phi, &beta, step, params.c2, substeps)?;
            match evaluate(trial_phi, boundary, params) {
                Ok(trial) => {
                    if trial.objective.j < current.objective.j {
                        t += step;
                        accepted += 1;
                        current = trial;
                        let rec = record(&current, iteration, t, step, true);
                        history.push(rec);
                        observer(
                            &rec,
                            Some(Snapshot {
                                iteration,
                                phi: &current.phi,
                                displacement: &current.u,
                                cutgeom: &current.cutgeom,
                                classification: &current.classification,
                                objective: current.objective,
                            }),
                        );
                        step *= 2.0;
                        break;
                    }
                    let rec = record(&trial, iteration, t, step, false);
                    history.push(rec);
                    observer(&rec, None);
                }
                Err(err) if is_recoverable(&err) => {
                    eprintln!("trial failed (T = {step:.3e}): {err}");
                    let rec = IterationRecord {
                        iteration,
                        t,
                        step,
                        objective: f64::INFINITY,
                        compliance: f64::INFINITY,
                        volume: 0.0,
                        accepted: false,
                        components: 0,
                        components_kept: 0,
                        holes: 0,
                    };
                    history.push(rec);
                    observer(&rec, None);
                }
                Err(err) => return Err(err),
            }
            step *= 0.5;
            if step < t_min {
                stop = StopReason::StepUnderflow;
                break 'outer;
            }
        }
    }

    // the accepted objective sequence is strictly decreasing by construction
    debug_assert!(history
        .iter()
        .filter(|r| r.accepted)
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[1].objective < w[0].objective));

    let state = OptimizationState {
        t,
        step,
        accepted_iterations: accepted,
        history,
        stop,
    };
    Ok((current.phi, state))
}

fn phi_mesh(phi: &LevelSetField) -> Arc<crate::mesh::RefinedMesh> {
    phi.mesh.clone()
}
