//! Command line driver for the level-set shape optimization runs.

mod config;

use anyhow::Context;
use clap::{Parser, Subcommand};
use levelcut::io::{csv_row, write_svg_boundary, write_vtk_levelset, write_vtk_solution, CSV_HEADER};
use levelcut::levelset::init_levelset;
use levelcut::shapeopt::optimize;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "levelcut", version, about = "Level-set shape optimization of elastic structures on a fixed background mesh")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an optimization and write logs and field snapshots
    Run {
        /// TOML configuration file
        config: PathBuf,
        /// Override the iteration budget
        #[arg(long)]
        max_iter: Option<usize>,
        /// Override the snapshot interval (accepted iterations)
        #[arg(long)]
        snapshot_every: Option<usize>,
        /// Override the output directory
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check a configuration and print the resolved parameters
    Validate {
        /// TOML configuration file
        config: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Validate { config } => {
            let cfg = config::load(&config)?;
            let resolved = config::resolve(&cfg)?;
            print!("{}", config::describe(&cfg, &resolved));
            Ok(())
        }
        Command::Run { config, max_iter, snapshot_every, out_dir } => {
            let mut cfg = config::load(&config)?;
            if let Some(n) = max_iter {
                cfg.max_iterations = n;
            }
            if let Some(n) = snapshot_every {
                cfg.snapshot_every = n;
            }
            if let Some(dir) = out_dir {
                cfg.out_dir = dir;
            }
            run(&cfg)
        }
    }
}

fn run(cfg: &config::RunConfig) -> anyhow::Result<()> {
    let resolved = config::resolve(cfg)?;
    let out_dir = resolved.out_dir.clone();
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    let phi0 = init_levelset(&resolved.mesh, &resolved.holes);
    let mut params = resolved.params;
    params.max_iterations = resolved.max_iterations;

    let csv_path = out_dir.join("iterations.csv");
    let mut csv = std::io::BufWriter::new(
        std::fs::File::create(&csv_path)
            .with_context(|| format!("cannot create {}", csv_path.display()))?,
    );
    writeln!(csv, "{CSV_HEADER}")?;

    let snapshot_every = resolved.snapshot_every;
    let material = params.material;
    let start = Instant::now();
    let mut io_error: Option<anyhow::Error> = None;
    let result = optimize(&phi0, &resolved.boundary, &params, &mut |record, snapshot| {
        if io_error.is_some() {
            return;
        }
        if let Err(err) = writeln!(csv, "{}", csv_row(record)) {
            io_error = Some(err.into());
            return;
        }
        if let Some(snap) = snapshot {
            let due = snapshot_every > 0 && snap.iteration % snapshot_every == 0;
            if due {
                let tag = format!("{:04}", snap.iteration);
                let write_all = || -> anyhow::Result<()> {
                    write_vtk_levelset(&out_dir.join(format!("phi_{tag}.vtk")), snap.phi)?;
                    write_vtk_solution(
                        &out_dir.join(format!("solution_{tag}.vtk")),
                        snap.displacement,
                        &material,
                    )?;
                    write_svg_boundary(
                        &out_dir.join(format!("boundary_{tag}.svg")),
                        snap.cutgeom,
                    )?;
                    Ok(())
                };
                if let Err(err) = write_all() {
                    io_error = Some(err);
                }
            }
        }
    });
    csv.flush()?;
    if let Some(err) = io_error {
        return Err(err.context("failed writing run artifacts"));
    }
    let (final_phi, state) = match result {
        Ok(pair) => pair,
        Err(err) => {
            // partial artifacts are already on disk; record the failure
            let note = out_dir.join("error.txt");
            let _ = std::fs::write(&note, format!("{err}\n"));
            return Err(err).context("optimization aborted (partial artifacts kept)");
        }
    };
    let wall = start.elapsed();

    // final state snapshots, re-solving once for the displacement field
    let cut = levelcut::levelset::extract_geometry(&final_phi, params.parallelism);
    write_vtk_levelset(&out_dir.join("phi_final.vtk"), &final_phi)?;
    write_svg_boundary(&out_dir.join("boundary_final.svg"), &cut)?;
    {
        use levelcut::elasticity::{assemble_system, solve, FESpace};
        let classification =
            levelcut::levelset::classify(&final_phi, &resolved.boundary, params.parallelism)?;
        let space = std::sync::Arc::new(FESpace::new(final_phi.mesh.clone(), &classification));
        let system = assemble_system(
            &space,
            &material,
            &cut,
            &classification,
            &resolved.boundary,
            &params.stabilization,
            params.parallelism,
        );
        let u = solve(&system, space)?;
        write_vtk_solution(&out_dir.join("solution_final.vtk"), &u, &material)?;
    }

    let last = state
        .history
        .iter()
        .filter(|r| r.accepted)
        .next_back()
        .expect("at least the initial state is recorded");
    let summary = format!(
        "stop            {:?}\naccepted steps  {}\npseudo-time     {:.6e}\nobjective       {:.6e}\ncompliance      {:.6e}\nvolume          {:.6e}\nwall time       {:.3?}\n",
        state.stop, state.accepted_iterations, state.t, last.objective, last.compliance, last.volume, wall
    );
    std::fs::write(out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}
