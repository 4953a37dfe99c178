use std::fs::OpenOptions;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use pareto_tour::baselines::{moead, nsga2, uniform_weights, weighted_sum, EvoConfig};
use pareto_tour::concave::{concave_demo, write_concave_csv, ConcaveConfig, ConcaveMethod};
use pareto_tour::instances::{self, GridMapFile, InstanceFile};
use pareto_tour::metrics::{clipped_count, hv_exact_2d, hv_monte_carlo_workers, reference_point, ReferencePoint, RunReport};
use pareto_tour::policy::{self, Checkpoint, FeatureSchema, TrainConfig};
use pareto_tour::search::{solve_front, SearchConfig};
use pareto_tour::{generate_preferences, ArchiveEntry, BtspInstance, ObjectiveVector, ParetoArchive, RngSeed};

use crate::error::{file_error, CliError};
use crate::{Algo, AlgoArgs, CompareArgs, EvalArgs, InferArgs, ReportArgs, TrainArgs};

const MC_WORKERS: usize = 8;

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(file_error(path))
}

fn load_instance(path: &Path) -> Result<BtspInstance, CliError> {
    let text = std::fs::read_to_string(path).map_err(file_error(path))?;
    Ok(InstanceFile::from_json(&text)?.to_instance()?)
}

fn write_archive(path: &Path, archive: &ParetoArchive) -> Result<(), CliError> {
    let json = serde_json::to_string(archive).map_err(pareto_tour::Error::from)?;
    write_text(path, &(json + "\n"))
}

pub fn gen_euclidean(n: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let inst: BtspInstance = instances::gen_euclidean(n, RngSeed(seed))?.into();
    let mut meta = Map::new();
    meta.insert("generator".into(), json!("euclidean"));
    write_text(out, &(InstanceFile::from_instance(&inst, seed, meta).to_json()? + "\n"))?;
    println!("{} seed {seed}", out.display());
    Ok(())
}

pub fn gen_coverage(
    width: usize,
    height: usize,
    density: f64,
    n: usize,
    seed: u64,
    out: &Path,
    map_out: Option<&Path>,
) -> Result<(), CliError> {
    let cov = instances::gen_coverage(width, height, density, n, RngSeed(seed))?;
    let mut meta = Map::new();
    meta.insert("generator".into(), json!("coverage"));
    meta.insert("width".into(), json!(width));
    meta.insert("height".into(), json!(height));
    meta.insert("density".into(), json!(density));
    meta.insert("points".into(), json!(cov.points.iter().map(|&(r, c)| [r, c]).collect::<Vec<_>>()));
    let inst: BtspInstance = cov.instance.into();
    write_text(out, &(InstanceFile::from_instance(&inst, seed, meta).to_json()? + "\n"))?;
    if let Some(path) = map_out {
        let json = serde_json::to_string(&GridMapFile::from(&cov.map)).map_err(pareto_tour::Error::from)?;
        write_text(path, &(json + "\n"))?;
    }
    println!("{} seed {seed}", out.display());
    Ok(())
}

fn reference(args: &ReportArgs, n: Option<usize>) -> Result<ReferencePoint, CliError> {
    match (&args.reference, n) {
        (Some(r), _) => Ok(ReferencePoint::new(r[0], r[1])?),
        (None, Some(n)) => Ok(reference_point(n)),
        (None, None) => Err(CliError::Usage("cannot infer n for the reference point; pass --n or --ref".into())),
    }
}

struct Scores {
    reference: ReferencePoint,
    mc: f64,
    exact: f64,
    clipped: usize,
}

fn score(points: &[ObjectiveVector], args: &ReportArgs, n: Option<usize>, seed: u64) -> Result<Scores, CliError> {
    let reference = reference(args, n)?;
    let mc = hv_monte_carlo_workers(points, &reference, args.mc_samples, RngSeed(seed), MC_WORKERS)?;
    Ok(Scores { exact: hv_exact_2d(points, &reference), clipped: clipped_count(points, &reference), mc, reference })
}

fn append_reports(rows: &[RunReport], args: &ReportArgs) -> Result<(), CliError> {
    if let Some(path) = &args.report {
        let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(file_error(path))?;
        RunReport::write_csv(rows, file, fresh)?;
    }
    if let Some(path) = &args.report_jsonl {
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(file_error(path))?;
        RunReport::write_jsonl(rows, file)?;
    }
    Ok(())
}

fn search_config(a: &AlgoArgs, seed: u64) -> SearchConfig {
    SearchConfig {
        outer_rounds: a.outer_rounds,
        inner_moves: a.inner_moves,
        restarts: a.restarts,
        seed: RngSeed(seed),
        warm_start: !a.no_warm_start,
        ..SearchConfig::default()
    }
}

fn evo_config(a: &AlgoArgs, seed: u64) -> EvoConfig {
    EvoConfig {
        population: a.population,
        evaluations: a.evals,
        neighborhood_t: a.neighbourhood,
        seed: RngSeed(seed),
        ..EvoConfig::default()
    }
}

fn run_algo(algo: Algo, inst: &BtspInstance, seed: u64, a: &AlgoArgs) -> Result<(ParetoArchive, Value), CliError> {
    Ok(match algo {
        Algo::Search => {
            let cfg = search_config(a, seed);
            (solve_front(inst, &generate_preferences(a.prefs)?, &cfg)?, json!({"prefs": a.prefs, "search": cfg}))
        }
        Algo::Wsum => {
            let cfg = search_config(a, seed);
            (weighted_sum(inst, &uniform_weights(a.weights), &cfg)?, json!({"weights": a.weights, "search": cfg}))
        }
        Algo::Nsga2 => {
            let cfg = evo_config(a, seed);
            (nsga2(inst, &cfg)?, json!({"evo": cfg}))
        }
        Algo::Moead => {
            let cfg = evo_config(a, seed);
            (moead(inst, &cfg, a.prefs)?, json!({"prefs": a.prefs, "evo": cfg}))
        }
        Algo::Policy => {
            let path = a
                .checkpoint
                .as_deref()
                .ok_or_else(|| CliError::Usage("--algo policy needs --checkpoint (produce one with `train`)".into()))?;
            let text = std::fs::read_to_string(path).map_err(file_error(path))?;
            let ck = Checkpoint::from_json(&text)?;
            let archive =
                policy::infer_front(&ck.policy()?, inst, &generate_preferences(a.prefs)?, a.samples, RngSeed(seed))?;
            (archive, json!({"prefs": a.prefs, "samples": a.samples, "checkpoint": path.display().to_string()}))
        }
    })
}

pub fn solve(
    algo: Algo,
    instance: &Path,
    out: Option<&Path>,
    seed: u64,
    a: &AlgoArgs,
    report: &ReportArgs,
) -> Result<RunReport, CliError> {
    let inst = load_instance(instance)?;
    let start = Instant::now();
    let (archive, config) = run_algo(algo, &inst, seed, a)?;
    let wall_s = start.elapsed().as_secs_f64();
    if let Some(path) = out {
        write_archive(path, &archive)?;
    }
    let s = score(&archive.objectives(), report, Some(inst.n()), seed)?;
    let row = RunReport {
        algo: algo.name().into(),
        instance: instance.display().to_string(),
        seed,
        hv_pct: s.mc,
        archive_size: archive.len(),
        wall_s,
        hv_exact_pct: Some(s.exact),
        reference: Some(s.reference),
        clipped: s.clipped,
        mc_workers: MC_WORKERS,
        config,
    };
    append_reports(std::slice::from_ref(&row), report)?;
    println!(
        "{} seed {seed}: {} points, HV {:.4}% (exact {:.4}%), {:.3}s",
        row.algo, row.archive_size, s.mc, s.exact, wall_s
    );
    Ok(row)
}

pub fn train(a: &TrainArgs) -> Result<(), CliError> {
    let cfg = TrainConfig {
        iterations: a.iters,
        batch_size: a.batch,
        prefs: a.prefs,
        eta_actor: a.eta_actor,
        eta_critic: a.eta_critic,
        alpha: a.alpha,
        lambda_max: a.lambda_max,
        seed: RngSeed(a.seed.seed),
        schema: if a.no_preference_features { FeatureSchema::NoPreference } else { FeatureSchema::Full },
        ..TrainConfig::default()
    };
    let n = a.n;
    let start = Instant::now();
    let out = policy::train(|s| Ok(instances::gen_euclidean(n, s)?.into()), &cfg)?;
    Checkpoint::new(&out.policy, &out.critic, out.multipliers.lambdas()).write(&a.out)?;
    if let Some(path) = &a.history {
        let mut text = String::from("iteration,pref,reward,norm,g,lambda\n");
        for (it, s) in out.history.iter().enumerate() {
            for k in 0..s.reward.len() {
                text += &format!("{it},{k},{},{},{},{}\n", s.reward[k], s.norm[k], s.g[k], s.lambdas[k]);
            }
        }
        write_text(path, &text)?;
    }
    let (first, last) = (out.history.first(), out.history.last());
    println!(
        "{} iterations in {:.1}s; mean reward {} -> {}; checkpoint {}",
        cfg.iterations,
        start.elapsed().as_secs_f64(),
        first.map_or("-".into(), |s| format!("{:.4}", s.mean_reward())),
        last.map_or("-".into(), |s| format!("{:.4}", s.mean_reward())),
        a.out.display()
    );
    Ok(())
}

pub fn infer(a: &InferArgs) -> Result<(), CliError> {
    let algo_args = AlgoArgs {
        prefs: a.prefs,
        samples: a.samples,
        checkpoint: Some(a.checkpoint.clone()),
        ..default_algo_args()
    };
    solve(Algo::Policy, &a.instance, a.out.as_deref(), a.seed.seed, &algo_args, &a.report).map(drop)
}

fn default_algo_args() -> AlgoArgs {
    use clap::FromArgMatches;
    let cmd = <AlgoArgs as clap::Args>::augment_args(clap::Command::new("defaults"));
    AlgoArgs::from_arg_matches(&cmd.get_matches_from(["defaults"])).expect("defaults parse")
}

pub fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.archive).map_err(file_error(&a.archive))?;
    let entries: Vec<ArchiveEntry> = serde_json::from_str(&text).map_err(pareto_tour::Error::from)?;
    let n = entries.first().map(|e| e.tour.len()).or(a.n);
    let points: Vec<ObjectiveVector> = entries.iter().map(ArchiveEntry::objectives).collect();
    let s = score(&points, &a.report, n, a.seed.seed)?;
    let row = RunReport {
        algo: "eval".into(),
        instance: a.archive.display().to_string(),
        seed: a.seed.seed,
        hv_pct: s.mc,
        archive_size: points.len(),
        wall_s: 0.0,
        hv_exact_pct: Some(s.exact),
        reference: Some(s.reference),
        clipped: s.clipped,
        mc_workers: MC_WORKERS,
        config: json!({"mc_samples": a.report.mc_samples}),
    };
    append_reports(std::slice::from_ref(&row), &a.report)?;
    println!(
        "HV exact {:.4}% | Monte-Carlo {:.4}% ({} samples) | ref ({}, {}) | {} points, {} outside the box",
        s.exact, s.mc, a.report.mc_samples, s.reference.r1, s.reference.r2, points.len(), s.clipped
    );
    Ok(())
}

pub fn compare(a: &CompareArgs) -> Result<(), CliError> {
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(file_error(dir))?;
    }
    println!("{:<8} {:>6} {:>10} {:>10} {:>8}", "algo", "runs", "mean HV%", "best HV%", "mean s");
    for &algo in &a.algos {
        let mut rows = Vec::new();
        for run in 0..a.runs {
            let seed = a.seed.seed + run;
            let out = a.out_dir.as_ref().map(|d| d.join(format!("{}-{seed}.json", algo.name())));
            rows.push(solve(algo, &a.instance, out.as_deref(), seed, &a.algo_args, &a.report)?);
        }
        let mean = |f: fn(&RunReport) -> f64| rows.iter().map(f).sum::<f64>() / rows.len().max(1) as f64;
        let best = rows.iter().map(|r| r.hv_pct).fold(f64::NEG_INFINITY, f64::max);
        println!("{:<8} {:>6} {:>10.4} {:>10.4} {:>8.3}", algo.name(), rows.len(), mean(|r| r.hv_pct), best, mean(|r| r.wall_s));
    }
    Ok(())
}

/// Leader clustering in objective space.
fn clusters(points: &[ObjectiveVector], radius: f64) -> usize {
    let mut leaders: Vec<ObjectiveVector> = Vec::new();
    for p in points {
        if leaders.iter().all(|l| l.distance(p) > radius) {
            leaders.push(*p);
        }
    }
    leaders.len()
}

pub fn demo_concave(k: usize, weights: usize, out: Option<&Path>) -> Result<(), CliError> {
    let rows = concave_demo(k, weights, &ConcaveConfig::default())?;
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(file_error(path))?;
            write_concave_csv(&rows, file)?;
        }
        None => write_concave_csv(&rows, std::io::stdout().lock())?,
    }
    let pick = |m| rows.iter().filter(|r| r.method == m).map(|r| ObjectiveVector::new(r.f1, r.f2)).collect::<Vec<_>>();
    let dec = pareto_tour::nondominated_filter(&pick(ConcaveMethod::Decomposition));
    let lin = pick(ConcaveMethod::Scalarization);
    eprintln!(
        "decomposition: {} nondominated, {} distinct at 0.02 | scalarization: {} clusters at 0.05",
        dec.len(),
        clusters(&dec, 0.02),
        clusters(&lin, 0.05)
    );
    Ok(())
}
