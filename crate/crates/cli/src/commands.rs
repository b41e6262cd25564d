//! Subcommand implementations and the file formats they exchange.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use klee_core::geometry::Instance;
use klee_core::instances::{generate, verify_family, Family, FamilySpec};
use klee_core::maxima::{box_maxima, measure_maxima_filtered};
use klee_core::oracle::grid_measure;
use klee_core::profile::{compute_profile, measure_profile_partitioned};
use klee_core::report::{Algorithm, MeasureReport, Stats};
use klee_core::solver::{measure, SolverConfig};
use klee_core::treewidth::{
    build_intersection_graph, decomposition_from_components, fold_nonredundant,
    heuristic_decomposition, measure_combined, measure_treewidth_heuristic, tw_measure,
    TreeDecomposition,
};
use klee_core::{FamilyError, OracleError};

use crate::router;

/// Exact volumes of unions of axis-parallel boxes, with adaptive algorithms.
#[derive(Debug, Parser)]
#[command(name = "klee", version, arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure an instance file and print a JSON report.
    Measure(MeasureArgs),
    /// Print the adaptive parameters of an instance as JSON.
    Stats(StatsArgs),
    /// Generate a named instance family into a JSON file.
    Gen(GenArgs),
    /// Time algorithms over a grid of generated instances, writing CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Instance file (JSON).
    instance: PathBuf,
    /// Algorithm to run; `auto` routes on measured instance parameters.
    #[arg(long, value_enum, default_value_t = AlgoArg::Auto)]
    algo: AlgoArg,
    /// Tree decomposition file (JSON); only for `treewidth` and `combined`.
    #[arg(long)]
    decomp: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Instance file (JSON).
    instance: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Family name: nested, chain, dominated, stacked or random.
    family: String,
    /// Number of boxes.
    n: usize,
    /// Dimension.
    d: usize,
    /// Family parameter: maximal boxes `m` for dominated, group size `k`
    /// for stacked.
    #[arg(long)]
    param: Option<usize>,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated family names.
    #[arg(long, value_delimiter = ',', required = true)]
    families: Vec<String>,
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    /// Dimension shared by every case.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Comma-separated algorithms to time on every instance.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<AlgoArg>,
    /// Family parameter, passed to every generated instance that needs one.
    #[arg(long)]
    param: Option<usize>,
    /// Generator seed shared by every case.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file.
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum AlgoArg {
    Oracle,
    Sweep,
    Maxima,
    Profile,
    Treewidth,
    Combined,
    Auto,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Decomposition(String),
    #[error("{0}")]
    Usage(String),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Measure(args) => cmd_measure(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.into(),
        source,
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    parse_json(path, &read_to_string(path)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.into(),
        source,
    })
}

fn cmd_measure(args: MeasureArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let decomp: Option<TreeDecomposition> = match &args.decomp {
        Some(path) => {
            if !matches!(args.algo, AlgoArg::Treewidth | AlgoArg::Combined) {
                return Err(CliError::Usage(format!(
                    "--decomp applies only to --algo treewidth or combined, not {}",
                    format!("{:?}", args.algo).to_lowercase()
                )));
            }
            Some(parse_json(path, &read_to_string(path)?)?)
        }
        None => None,
    };

    let cfg = SolverConfig::default();
    let started = Instant::now();
    let mut report = dispatch(&inst, args.algo, decomp.as_ref(), &cfg)?;
    report.wall_time = started.elapsed().as_secs_f64();

    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(path) = &args.out {
        write_file(path, &format!("{text}\n"))?;
    }
    Ok(())
}

/// Runs one algorithm on one instance. `wall_time` is left for the caller,
/// who knows what else it wants to include in the timing.
fn dispatch(
    inst: &Instance,
    algo: AlgoArg,
    decomp: Option<&TreeDecomposition>,
    cfg: &SolverConfig,
) -> Result<MeasureReport, CliError> {
    let algo = match algo {
        AlgoArg::Auto => router::choose(inst),
        other => other,
    };
    let decomposition_error = |e: klee_core::treewidth::DecompositionError| {
        CliError::Decomposition(e.to_string())
    };
    Ok(match algo {
        AlgoArg::Oracle => {
            let volume = grid_measure(inst)?;
            MeasureReport::new(volume, Algorithm::Oracle, Stats::new(inst.len(), inst.dim()))
        }
        AlgoArg::Sweep => MeasureReport::new(
            measure(inst, cfg),
            Algorithm::Sweep,
            Stats::new(inst.len(), inst.dim()),
        ),
        AlgoArg::Maxima => measure_maxima_filtered(inst, cfg),
        AlgoArg::Profile => measure_profile_partitioned(inst, cfg),
        AlgoArg::Treewidth => match decomp {
            Some(td) => tw_measure(inst, td, cfg).map_err(decomposition_error)?,
            None => measure_treewidth_heuristic(inst, cfg),
        },
        AlgoArg::Combined => measure_combined(inst, decomp, cfg).map_err(decomposition_error)?,
        AlgoArg::Auto => unreachable!("auto resolves to a concrete algorithm"),
    })
}

/// Adaptive parameters of one instance, as printed by `stats`.
#[derive(Debug, Serialize)]
struct InstanceStats {
    n: usize,
    d: usize,
    /// Number of maximal (undominated) boxes.
    h: usize,
    /// Per-axis maximum stabbing numbers.
    per_dim: Vec<usize>,
    /// Profile: smallest entry of `per_dim`.
    k: usize,
    /// Quasi-profile: largest entry of `per_dim`.
    kappa: usize,
    /// Connected components of the intersection graph.
    components: usize,
    /// Width of the folded min-fill tree decomposition.
    heuristic_width: usize,
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let profile = compute_profile(&inst);
    let g = build_intersection_graph(&inst);
    let components = if inst.is_empty() {
        0
    } else {
        decomposition_from_components(&g).node_count()
    };
    let stats = InstanceStats {
        n: inst.len(),
        d: inst.dim(),
        h: box_maxima(inst.boxes()).h(),
        per_dim: profile.per_dim,
        k: profile.profile,
        kappa: profile.quasi_profile,
        components,
        heuristic_width: fold_nonredundant(&heuristic_decomposition(&g)).width(),
    };
    let text = serde_json::to_string_pretty(&stats).expect("stats serialize");
    println!("{text}");
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let family: Family = args.family.parse()?;
    let spec = FamilySpec {
        family,
        n: args.n,
        d: args.d,
        param: args.param,
        seed: args.seed,
    };
    let inst = generate(&spec)?;
    let verdict = verify_family(&inst, &spec);
    assert!(
        verdict.is_ok(),
        "generated instance violates its family guarantees: {:?}",
        verdict.violations()
    );
    let text = serde_json::to_string_pretty(&inst).expect("instance serializes");
    write_file(&args.out, &format!("{text}\n"))
}

const CSV_HEADER: &str = "family,n,d,seed,algo,volume,h,k,kappa,m,rho,width,wall_time_s";

fn csv_row(family: Family, seed: u64, report: &MeasureReport) -> String {
    fn cell(v: Option<usize>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    let s = &report.stats;
    format!(
        "{family},{},{},{seed},{},{},{},{},{},{},{},{},{}",
        s.n,
        s.d,
        report.algorithm,
        report.volume,
        cell(s.h),
        cell(s.k),
        cell(s.kappa),
        cell(s.m),
        cell(s.rho),
        cell(s.width),
        report.wall_time,
    )
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let families = args
        .families
        .iter()
        .map(|name| name.parse::<Family>())
        .collect::<Result<Vec<_>, _>>()?;

    let cfg = SolverConfig::default();
    let mut rows = vec![CSV_HEADER.to_string()];
    for &family in &families {
        for &n in &args.ns {
            let spec = FamilySpec {
                family,
                n,
                d: args.d,
                param: args.param,
                seed: args.seed,
            };
            let inst = generate(&spec)?;
            for &algo in &args.algos {
                let started = Instant::now();
                let mut report = dispatch(&inst, algo, None, &cfg)?;
                report.wall_time = started.elapsed().as_secs_f64();
                rows.push(csv_row(family, args.seed, &report));
            }
        }
    }
    write_file(&args.csv, &format!("{}\n", rows.join("\n")))
}
