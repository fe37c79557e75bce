//! Command-line driver: instance generation, seeded campaigns, scoring and
//! ad-hoc front filtering.

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vrpstw::harness::{self, Campaign, GaOverrides, GenOverrides, MANIFEST};
use vrpstw::instances::STUDY_CLASSES;
use vrpstw::metrics::{build_reference, read_front, write_front};
use vrpstw::{Algorithm, Error, InstanceSpec};

#[derive(Parser)]
#[command(name = "vrpstw", version, about = "Multi-objective VRP with soft time windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance file per class string.
    Generate(GenerateArgs),
    /// Run every selected algorithm on every instance, several seeded times.
    Run(RunArgs),
    /// Score run records against per-instance reference fronts.
    Score(ScoreArgs),
    /// Print the nondominated union of one or more front files.
    Pareto(ParetoArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Class string `alpha;beta;gamma;delta`, e.g. `R;20;1.00;10`. Repeatable.
    #[arg(long = "spec", required_unless_present = "study")]
    specs: Vec<String>,
    /// Add the forty classes of the reference study.
    #[arg(long)]
    study: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Side of the square plane.
    #[arg(long)]
    plane: Option<f64>,
    #[arg(long)]
    demand_min: Option<u32>,
    #[arg(long)]
    demand_max: Option<u32>,
    /// Unloading time per customer.
    #[arg(long)]
    unload: Option<f64>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    horizon_start: Option<f64>,
    #[arg(long)]
    horizon_end: Option<f64>,
    /// Cluster centers for clustered classes.
    #[arg(long)]
    clusters: Option<usize>,
    /// Standard deviation around a cluster center.
    #[arg(long)]
    cluster_spread: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Instance files, or directories holding a manifest.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Algorithm (MOLSD, PMX, OBX, UOBX, UOBX^2EX). Repeatable; all by default.
    #[arg(long = "algo")]
    algorithms: Vec<String>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    p_mut: Option<f64>,
    #[arg(long)]
    stagnation: Option<u64>,
    /// Directory receiving one JSON record per run.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory of run records.
    records: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoArgs {
    #[arg(required = true)]
    fronts: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status per failure category.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 4,
        Error::SpecParse { .. }
        | Error::InstanceParse { .. }
        | Error::FrontParse { .. }
        | Error::Json(_)
        | Error::Csv(_) => 5,
        Error::Config(_) | Error::Generation(_) => 3,
        _ => 1,
    }
}

fn expand_instances(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let m = p.join(MANIFEST);
            let text = fs::read_to_string(&m).map_err(|e| Error::Io { path: m, source: e })?;
            out.extend(text.lines().filter(|l| !l.trim().is_empty()).map(|l| p.join(l.trim())));
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let mut specs = args
        .specs
        .iter()
        .map(|s| s.parse::<InstanceSpec>())
        .collect::<Result<Vec<_>, _>>()?;
    if args.study {
        specs.extend(STUDY_CLASSES.iter().map(|s| s.parse::<InstanceSpec>().expect("valid class")));
    }
    let overrides = GenOverrides {
        plane: args.plane,
        demand_min: args.demand_min,
        demand_max: args.demand_max,
        unload: args.unload,
        capacity: args.capacity,
        horizon_start: args.horizon_start,
        horizon_end: args.horizon_end,
        clusters: args.clusters,
        cluster_spread: args.cluster_spread,
    };
    let paths = harness::cmd_generate(&specs, args.seed, &overrides, &args.out)?;
    eprintln!("wrote {} instances to {}", paths.len(), args.out.display());
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Error> {
    let algorithms = if args.algorithms.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        args.algorithms
            .iter()
            .map(|a| a.parse())
            .collect::<Result<Vec<Algorithm>, _>>()?
    };
    let campaign = Campaign {
        instances: expand_instances(&args.instances)?,
        algorithms,
        runs: args.runs,
        base_seed: args.seed,
        out: args.out,
        overrides: GaOverrides {
            pop_size: args.pop_size,
            p_mut: args.p_mut,
            stagnation: args.stagnation,
        },
    };
    let paths = harness::cmd_run(&campaign)?;
    let failed = harness::load_records(&campaign.out)?
        .iter()
        .filter(|r| !r.is_ok())
        .count();
    eprintln!(
        "wrote {} records to {} ({failed} failed runs)",
        paths.len(),
        campaign.out.display()
    );
    Ok(())
}

fn score(args: ScoreArgs) -> Result<(), Error> {
    let rows = harness::score_table(&harness::load_records(&args.records)?)?;
    let mut buf = Vec::new();
    harness::write_score_csv(&rows, &mut buf)?;
    write_output(args.out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn pareto(args: ParetoArgs) -> Result<(), Error> {
    let fronts = args
        .fronts
        .iter()
        .map(|p| {
            let f = fs::File::open(p).map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
            read_front(BufReader::new(f))
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_output(args.out.as_deref(), &write_front(&build_reference(&fronts)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Score(a) => score(a),
        Command::Pareto(a) => pareto(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
