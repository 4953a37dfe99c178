mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Bi-objective TSP front approximation: generate instances, run solvers,
/// train and apply the policy, score archives.
#[derive(Debug, Parser)]
#[command(name = "pareto-tour", version, args_override_self = true)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance file.
    #[command(subcommand)]
    Gen(GenKind),
    /// Run one algorithm on an instance and write its archive.
    Solve(SolveArgs),
    /// Train the policy on random Euclidean instances.
    Train(TrainArgs),
    /// Decode a front from a trained checkpoint.
    Infer(InferArgs),
    /// Hypervolume of an archive file.
    Eval(EvalArgs),
    /// Run several algorithms over several seeds on one instance.
    Compare(CompareArgs),
    /// Decomposition versus linear scalarization on the concave test problem.
    DemoConcave(ConcaveArgs),
}

#[derive(Debug, Args)]
struct SeedArg {
    #[arg(long, env = "PARETO_TOUR_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Uniform cities in the unit square, one layout per objective.
    Euclidean {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Grid map with obstacles: A* path lengths and a second random metric.
    Coverage {
        #[arg(long, default_value_t = 30)]
        width: usize,
        #[arg(long, default_value_t = 30)]
        height: usize,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the grid map.
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Search,
    Policy,
    Nsga2,
    Moead,
    Wsum,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Self::Search => "search",
            Self::Policy => "policy",
            Self::Nsga2 => "nsga2",
            Self::Moead => "moead",
            Self::Wsum => "wsum",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Append a report row to this CSV file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Append the full report row as JSON lines.
    #[arg(long)]
    report_jsonl: Option<PathBuf>,
    /// Reference point (default: (n, n)).
    #[arg(long = "ref", num_args = 2, value_names = ["R1", "R2"])]
    reference: Option<Vec<f64>>,
    /// Monte-Carlo samples for the reported hypervolume.
    #[arg(long, default_value_t = pareto_tour::metrics::DEFAULT_MC_SAMPLES)]
    mc_samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    /// Preference count (search, policy, moead subproblems).
    #[arg(long, default_value_t = 100)]
    prefs: usize,
    /// Convex weight count (wsum).
    #[arg(long, default_value_t = 100)]
    weights: usize,
    /// Evaluation budget (nsga2, moead).
    #[arg(long, default_value_t = 20_000)]
    evals: usize,
    #[arg(long, default_value_t = 100)]
    population: usize,
    #[arg(long, default_value_t = 10)]
    neighbourhood: usize,
    /// Descent rounds per restart (search, wsum).
    #[arg(long, default_value_t = 10)]
    outer_rounds: usize,
    #[arg(long, default_value_t = 2000)]
    inner_moves: usize,
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    /// Start every preference independently (parallel) instead of warm-starting.
    #[arg(long)]
    no_warm_start: bool,
    /// Trained parameters (policy).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Tours per preference (policy): greedy plus sampled.
    #[arg(long, default_value_t = 1)]
    samples: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    algo_args: AlgoArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Cities per training instance.
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 8)]
    batch: usize,
    #[arg(long, default_value_t = 20)]
    prefs: usize,
    #[arg(long, default_value_t = 1e-2)]
    eta_actor: f64,
    #[arg(long, default_value_t = 1e-2)]
    eta_critic: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 50.0)]
    lambda_max: f64,
    /// Hold the preference-interaction features at zero.
    #[arg(long)]
    no_preference_features: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(short, long)]
    out: PathBuf,
    /// Per-iteration mean reward, norm, g and multiplier per preference.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InferArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    prefs: usize,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(short, long)]
    archive: PathBuf,
    /// City count for the default reference point when the archive is empty.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Search, Algo::Nsga2, Algo::Moead, Algo::Wsum])]
    algos: Vec<Algo>,
    /// Runs per algorithm, with seeds `seed..seed + runs`.
    #[arg(long, default_value_t = 3)]
    runs: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// Directory for the per-run archives.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    algo_args: AlgoArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Debug, Args)]
struct ConcaveArgs {
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    weights: usize,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Gen(GenKind::Euclidean { n, seed, out }) => commands::gen_euclidean(n, seed.seed, &out),
        Command::Gen(GenKind::Coverage { width, height, density, n, seed, out, map_out }) => {
            commands::gen_coverage(width, height, density, n, seed.seed, &out, map_out.as_deref())
        }
        Command::Solve(a) => {
            commands::solve(a.algo, &a.instance, a.out.as_deref(), a.seed.seed, &a.algo_args, &a.report).map(drop)
        }
        Command::Train(a) => commands::train(&a),
        Command::Infer(a) => commands::infer(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::DemoConcave(a) => commands::demo_concave(a.k, a.weights, a.out.as_deref()),
    }
}

fn main() {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
