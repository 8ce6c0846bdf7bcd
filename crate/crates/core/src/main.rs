//! Command-line front end: forward simulation, single optimizations, CO₂
//! sweeps, time-series aggregation and input validation.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use dhn_retrofit::io::{read_design, read_timeseries, write_periods};
use dhn_retrofit::runner::{export_results, problem_at, run_scenario, simulate, PointStatus, RunManifest};
use dhn_retrofit::timeagg::build_period_set;
use dhn_retrofit::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dhn-retrofit", version, about = "Producer retrofit optimization for district heating networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Forward-solve residual tolerance (overrides the manifest).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Random seed (overrides the manifest).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "DHN_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct ManifestArgs {
    /// Run manifest (TOML).
    manifest: PathBuf,
    /// Output directory (overrides the manifest).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Forward simulation of a given design at the scenario's CO₂ price.
    Simulate {
        #[command(flatten)]
        run: ManifestArgs,
        /// Design file (CSV) as written by `optimize`.
        #[arg(long)]
        design: PathBuf,
    },
    /// Optimize once at the scenario's CO₂ price.
    Optimize {
        #[command(flatten)]
        run: ManifestArgs,
    },
    /// Optimize every CO₂ price of the manifest's sweep.
    Sweep {
        #[command(flatten)]
        run: ManifestArgs,
    },
    /// Build representative periods from an hourly time series.
    Aggregate {
        /// Hourly time series (CSV).
        timeseries: PathBuf,
        /// Output period file (TOML).
        #[arg(short, long)]
        output: PathBuf,
        /// Number of representative periods, peak excluded.
        #[arg(long, default_value_t = 3)]
        clusters: usize,
        /// Hours per clustering block.
        #[arg(long, default_value_t = 24)]
        block_len: usize,
    },
    /// Check that a manifest and all files it references parse.
    Validate {
        manifest: PathBuf,
    },
}

/// Failure carrying a process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(e) if is_input_error(e) => 2,
            Some(_) => 3,
            None => 2,
        };
        Failure { code, error }
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. }
            | Error::Io(_)
            | Error::InvalidScenario(_)
            | Error::InvalidNetwork(_)
            | Error::DanglingReference(_)
            | Error::NonPositiveGeometry(_)
            | Error::DisconnectedGraph(_)
            | Error::ShapeMismatch(_)
            | Error::NonFinite(_)
            | Error::DegenerateSeries(_)
            | Error::TooManyClusters { .. }
    )
}

fn load_manifest(cli: &Cli, args: &ManifestArgs) -> anyhow::Result<RunManifest> {
    let mut m = RunManifest::load(&args.manifest).with_context(|| format!("loading {}", args.manifest.display()))?;
    if let Some(s) = cli.seed {
        m.seed = s;
    }
    if let Some(t) = cli.tolerance {
        m.tolerances.solver = Some(t);
    }
    if let Some(o) = &args.output {
        m.output = std::env::current_dir()?.join(o);
    }
    Ok(m)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate { run, design } => {
            let m = load_manifest(cli, run)?;
            let inputs = m.load_inputs().map_err(anyhow::Error::from)?;
            let problem = problem_at(&inputs, inputs.scenario.economics.co2_price).map_err(anyhow::Error::from)?;
            let d = read_design(design, problem.layout).map_err(anyhow::Error::from)?;
            let solver = m.optimizer_options().solver;
            let j = simulate(&problem, &d, &solver, &m.output_dir()).map_err(anyhow::Error::from)?;
            println!("objective {j}");
        }
        Command::Optimize { run } | Command::Sweep { run } => {
            let mut m = load_manifest(cli, run)?;
            if matches!(cli.command, Command::Optimize { .. }) {
                m.sweep.clear();
            }
            let bundle = run_scenario(&m).map_err(anyhow::Error::from)?;
            let out = m.output_dir();
            export_results(&bundle, &out).map_err(anyhow::Error::from)?;
            for p in &bundle.points {
                let j = p.result().map(|r| r.objective.to_string()).unwrap_or_else(|| "-".into());
                println!("co2 {} {} objective {j}", p.co2_price, p.status().name());
            }
            println!("results written to {}", out.display());
            let ok = bundle.points.iter().filter(|p| p.status() == PointStatus::Converged).count();
            if ok < bundle.points.len() {
                let code = if ok == 0 { 3 } else { 4 };
                let error = anyhow::anyhow!("{} of {} points did not converge", bundle.points.len() - ok, bundle.points.len());
                return Err(Failure { code, error });
            }
        }
        Command::Aggregate { timeseries, output, clusters, block_len } => {
            let series = read_timeseries(timeseries).map_err(anyhow::Error::from)?;
            let set = build_period_set(&series, *clusters, *block_len, cli.seed.unwrap_or(42)).map_err(anyhow::Error::from)?;
            write_periods(output, &set).map_err(anyhow::Error::from)?;
            println!("{} periods written to {}", set.periods.len(), output.display());
        }
        Command::Validate { manifest } => {
            let m = RunManifest::load(manifest).map_err(anyhow::Error::from)?;
            let inputs = m.load_inputs().map_err(anyhow::Error::from)?;
            for c in m.sweep_values(&inputs.scenario) {
                problem_at(&inputs, c).map_err(anyhow::Error::from)?;
            }
            println!(
                "ok: {} nodes, {} edges, {} periods",
                inputs.graph.nodes.len(),
                inputs.graph.edges.len(),
                inputs.periods.periods.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
