//! Experiment-runner CLI: executes configured scenario × pusher runs and
//! emits deterministic CSV artifacts.
//!
//! Exit codes: 0 on success, 1 on validation errors, 2 on numerical
//! failures (ill-conditioned constructions, non-converged references,
//! field singularities).

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use larmor::error::Error;
use larmor::exp_coeffs::{
    build_exp_pc_coefficients, load_coefficients, save_coefficients, verify_stencil_on_semidisk,
};
use larmor::harness::{
    convergence_study, emit_convergence_csv, emit_energy_csv, emit_stability_csv,
    emit_trajectory_csv, energy_drift, preset, preset_names, run_simulation, ExperimentConfig,
};
use larmor::stability::{adams4_characteristic_roots, boris_report, StabilityReport};
use larmor::Vec3;

#[derive(Parser)]
#[command(
    name = "larmor",
    about = "Relativistic particle-pusher experiment harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured simulation and write its trajectory/energy CSVs.
    Run {
        /// JSON experiment config (see `presets show` for the schema).
        #[arg(long)]
        config: PathBuf,
        /// Directory that relative output paths are joined to.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the config's dt sweep and fit the convergence order.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Emit stability eigenvalues/roots for the Boris or Adams-4 stencil.
    Stability {
        /// boris | adams4
        #[arg(long)]
        method: String,
        /// Single ω_z value.
        #[arg(long, conflicts_with = "sweep")]
        omega_z: Option<f64>,
        /// Sweep a:b:n — n values from a to b inclusive.
        #[arg(long)]
        sweep: Option<String>,
        /// Output CSV path.
        #[arg(long, default_value = "stability.csv")]
        out: PathBuf,
    },
    /// Build or verify exponential predictor-corrector coefficients.
    Coeffs {
        #[command(subcommand)]
        action: CoeffsAction,
    },
    /// List or show the bundled experiment presets.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum CoeffsAction {
    /// Construct a coefficient set and save it as a JSON document.
    Build {
        #[arg(long, default_value_t = 22)]
        k: usize,
        #[arg(long, default_value_t = 3.15)]
        rho: f64,
        #[arg(long, default_value_t = 18)]
        rank: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a saved coefficient document on a fresh semidisk grid.
    Verify {
        /// Coefficient document produced by `coeffs build`.
        input: PathBuf,
        #[arg(long, default_value_t = 500)]
        grid_size: usize,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List bundled preset names.
    List,
    /// Print a preset's config document.
    Show { name: String },
}

fn joined(base: Option<&Path>, path: &Path) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::from_json(&text)
}

fn cmd_run(config: &Path, out_dir: Option<&Path>) -> Result<(), Error> {
    let cfg = load_config(config)?;
    let traj = run_simulation(&cfg)?;
    let last = traj.samples.last().expect("non-empty run");
    println!(
        "{} steps of {} (dt = {:.6e}); final t = {:.6e}, gamma = {:.12}",
        traj.samples.len() - 1,
        traj.method.label(),
        traj.dt,
        last.t,
        last.gamma,
    );
    let drift = energy_drift(&traj, traj.samples[0].t, f64::INFINITY);
    println!(
        "energy drift: peak-to-peak {:.3e}, net {:+.3e}",
        drift.peak_to_peak, drift.net
    );
    if let Some(p) = &cfg.outputs.trajectory_csv {
        let p = joined(out_dir, p);
        emit_trajectory_csv(&traj, &p)?;
        println!("wrote {}", p.display());
    }
    if let Some(p) = &cfg.outputs.energy_csv {
        let p = joined(out_dir, p);
        emit_energy_csv(&traj, &p)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_converge(config: &Path, out_dir: Option<&Path>) -> Result<(), Error> {
    let cfg = load_config(config)?;
    let table = convergence_study(&cfg)?;
    println!("method: {}", table.method.label());
    println!("{:>12}  {:>13}  fit", "dt", "error");
    for row in &table.rows {
        println!(
            "{:>12.6e}  {:>13.6e}  {}",
            row.dt,
            row.error,
            if row.in_fit_window { "*" } else { "floor" }
        );
    }
    match table.fitted_slope {
        Some(slope) => println!("fitted slope: {slope:.3}"),
        None => println!(
            "fitted slope: n/a ({})",
            if table.all_at_floor() {
                "all points at the error floor"
            } else {
                "fewer than 3 points above the floor"
            }
        ),
    }
    if let Some(p) = &cfg.outputs.convergence_csv {
        let p = joined(out_dir, p);
        emit_convergence_csv(&table, &p)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidConfig(format!("sweep '{spec}' is not a:b:n")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad sweep start '{}'", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad sweep end '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad sweep count '{}'", parts[2])))?;
    if n < 2 {
        return Err(Error::InvalidConfig("sweep needs at least 2 points".into()));
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn cmd_stability(
    method: &str,
    omega_z: Option<f64>,
    sweep: Option<&str>,
    out: &Path,
) -> Result<(), Error> {
    let omegas = match (omega_z, sweep) {
        (Some(v), None) => vec![v],
        (None, Some(spec)) => parse_sweep(spec)?,
        _ => {
            return Err(Error::InvalidConfig(
                "provide exactly one of --omega-z or --sweep".into(),
            ))
        }
    };
    let reports: Vec<StabilityReport> = match method {
        "boris" => omegas
            .iter()
            .map(|&w| boris_report(Vec3::new(0.0, 0.0, w)))
            .collect(),
        "adams4" => omegas
            .iter()
            .map(|&w| adams4_characteristic_roots(w))
            .collect(),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected boris or adams4)"
            )))
        }
    };
    for r in &reports {
        println!(
            "{} ω_z = {:+.6e}: max |root| = {:.12}",
            r.method.label(),
            r.omega.z,
            r.max_root_magnitude
        );
    }
    emit_stability_csv(&reports, out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_coeffs(action: &CoeffsAction) -> Result<(), Error> {
    match action {
        CoeffsAction::Build {
            k,
            rho,
            rank,
            tol,
            out,
        } => {
            let coeffs = build_exp_pc_coefficients(*k, *rho, *rank, *tol)?;
            println!(
                "built k = {}, rho = {}, rank = {} (retained {}/{}), svd_tol = {:.1e}",
                coeffs.k,
                coeffs.rho,
                coeffs.rank,
                coeffs.retained.0,
                coeffs.retained.1,
                coeffs.svd_tol
            );
            println!("held-out residual: {:.6e}", coeffs.max_residual);
            save_coefficients(&coeffs, out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        CoeffsAction::Verify { input, grid_size } => {
            let coeffs = load_coefficients(input)?;
            let residual = verify_stencil_on_semidisk(&coeffs, *grid_size);
            println!(
                "k = {}, rho = {}, rank = {}: residual {residual:.6e} on {grid_size} held-out points",
                coeffs.k, coeffs.rho, coeffs.rank
            );
            Ok(())
        }
    }
}

fn cmd_presets(action: &PresetsAction) -> Result<(), Error> {
    match action {
        PresetsAction::List => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
        PresetsAction::Show { name } => match preset(name) {
            Some(cfg) => {
                println!("{}", cfg.to_json());
                Ok(())
            }
            None => Err(Error::InvalidConfig(format!(
                "unknown preset '{name}' (try `presets list`)"
            ))),
        },
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Run { config, out_dir } => cmd_run(config, out_dir.as_deref()),
        Command::Converge { config, out_dir } => cmd_converge(config, out_dir.as_deref()),
        Command::Stability {
            method,
            omega_z,
            sweep,
            out,
        } => cmd_stability(method, *omega_z, sweep.as_deref(), out),
        Command::Coeffs { action } => cmd_coeffs(action),
        Command::Presets { action } => cmd_presets(action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_numerical() { 2 } else { 1 })
        }
    }
}
