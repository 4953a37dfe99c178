//! Per-preference local search on the Lagrangian `|F| + lambda * g(F, w)`
//! with multiplier ascent between rounds.

pub(crate) mod moves;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::archive::ParetoArchive;
use crate::decomposition::{MultiplierState, PreferenceSet, PreferenceVector};
use crate::error::{invalid, Result};
use crate::instance::{BtspInstance, CostMatrices};
use crate::objective::ObjectiveVector;
use crate::rng::RngSeed;
use crate::tour::Tour;

use moves::{all_moves, descend, nearest_neighbour, Move};

/// Budget and multiplier settings for the local-search solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Multiplier updates per restart.
    pub outer_rounds: usize,
    /// Candidate evaluations per round.
    pub inner_moves: usize,
    pub restarts: usize,
    /// Cone-membership tolerance used when picking the reported tour.
    pub epsilon_g: f64,
    pub seed: RngSeed,
    /// Multiplier ascent rate.
    pub alpha: f64,
    pub lambda_max: f64,
    /// Start each preference from the previous preference's tour. Disabling
    /// it lets preferences run in parallel.
    pub warm_start: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            outer_rounds: 10,
            inner_moves: 2000,
            restarts: 2,
            epsilon_g: 1e-3,
            seed: RngSeed(0),
            alpha: 20.0,
            lambda_max: MultiplierState::DEFAULT_LAMBDA_MAX,
            warm_start: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_rounds < 1 || self.inner_moves < 1 || self.restarts < 1 {
            return invalid("outer_rounds, inner_moves and restarts must all be at least 1");
        }
        if !(self.epsilon_g > 0.0) {
            return invalid(format!("epsilon_g = {} must be positive", self.epsilon_g));
        }
        MultiplierState::new(1, self.alpha, 0.0, self.lambda_max).map(|_| ())
    }

    fn multipliers(&self, k: usize) -> MultiplierState {
        MultiplierState::new(k, self.alpha, 0.0, self.lambda_max).expect("validated multiplier settings")
    }
}

/// Best tour found for one preference.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceSolution {
    pub tour: Tour,
    pub objectives: ObjectiveVector,
    /// Cone constraint of `objectives`, recomputed exactly.
    pub g: f64,
    pub lambda: f64,
}

/// Archive plus per-preference winners of a [`solve_front_detailed`] run.
#[derive(Debug, Clone)]
pub struct FrontSolution {
    pub archive: ParetoArchive,
    pub per_preference: Vec<PreferenceSolution>,
    pub multipliers: MultiplierState,
    pub evaluations: usize,
}

/// `g` that treats a zero objective vector as on every ray.
pub(crate) fn cone_g(f: &ObjectiveVector, w: &PreferenceVector) -> f64 {
    let norm = f.norm();
    if norm == 0.0 {
        0.0
    } else {
        1.0 - w.dot(f) / norm
    }
}

fn lagrangian(f: &ObjectiveVector, w: &PreferenceVector, lambda: f64) -> f64 {
    f.norm() + lambda * cone_g(f, w)
}

/// Records every candidate evaluation in the archive, building the tour only
/// when the archive will keep it.
pub(crate) fn archive_visitor<'a>(
    costs: &'a CostMatrices,
    archive: &'a mut ParetoArchive,
) -> impl FnMut(ObjectiveVector, &dyn Fn() -> Vec<usize>) + 'a {
    move |approx, build| {
        if archive.accepts(&approx) {
            let order = build();
            let exact = costs.evaluate(&order);
            archive.insert_with(exact, || Tour::from_canonical_unchecked(order));
        }
    }
}

pub(crate) struct Searcher<'a> {
    pub costs: &'a CostMatrices,
    pub moves: Vec<Move>,
}

impl<'a> Searcher<'a> {
    pub fn new(costs: &'a CostMatrices) -> Self {
        Self { costs, moves: all_moves(costs.n()) }
    }

    /// Nearest-neighbour start under the `(w1, w2)`-weighted edge cost.
    pub fn weighted_start(&self, w1: f64, w2: f64) -> Vec<usize> {
        nearest_neighbour(&self.costs.weighted(w1, w2))
    }
}

/// Minimizes the Lagrangian for preference `w` at a fixed multiplier.
///
/// Each restart descends with `outer_rounds * inner_moves` candidate
/// evaluations; the first starts from the weighted nearest-neighbour tour,
/// later ones from random tours. Returns the lowest-Lagrangian tour seen,
/// which is never worse than the nearest-neighbour start.
pub fn solve_preference(inst: &BtspInstance, w: &PreferenceVector, lambda: f64, cfg: &SearchConfig) -> Result<PreferenceSolution> {
    cfg.validate()?;
    if !(lambda >= 0.0) {
        return invalid(format!("multiplier {lambda} must be nonnegative"));
    }
    let costs = inst.costs();
    let searcher = Searcher::new(&costs);
    let mut rng = cfg.seed.rng();
    let score = |f: &ObjectiveVector| lagrangian(f, w, lambda);
    let budget = cfg.outer_rounds.saturating_mul(cfg.inner_moves);
    let mut best: Option<(Vec<usize>, ObjectiveVector)> = None;
    for restart in 0..cfg.restarts {
        let mut tour = if restart == 0 {
            searcher.weighted_start(w.w1(), w.w2())
        } else {
            Tour::random(costs.n(), &mut rng).into_inner()
        };
        let mut f = costs.evaluate(&tour);
        descend(&costs, &searcher.moves, &mut tour, &mut f, &score, budget, &mut rng, &mut |_, _| {});
        if best.as_ref().is_none_or(|(_, bf)| score(&f) < score(bf)) {
            best = Some((tour, f));
        }
    }
    let (tour, f) = best.expect("at least one restart");
    Ok(PreferenceSolution { tour: Tour::from_canonical_unchecked(tour), objectives: f, g: cone_g(&f, w), lambda })
}

/// Approximates the Pareto front with one Lagrangian search per preference.
pub fn solve_front(inst: &BtspInstance, prefs: &PreferenceSet, cfg: &SearchConfig) -> Result<ParetoArchive> {
    Ok(solve_front_detailed(inst, prefs, cfg)?.archive)
}

/// [`solve_front`] that also reports each preference's chosen tour and the
/// final multipliers.
///
/// For every preference: start from the better (by Lagrangian at
/// `lambda = 0`) of the weighted nearest-neighbour tour and, with warm
/// starts, the previous preference's tour; then alternate a descent of
/// `inner_moves` evaluations with one multiplier ascent step, for
/// `outer_rounds` rounds. Further restarts begin from random tours with the
/// multiplier reset. Every evaluated tour is offered to the archive.
pub fn solve_front_detailed(inst: &BtspInstance, prefs: &PreferenceSet, cfg: &SearchConfig) -> Result<FrontSolution> {
    cfg.validate()?;
    let costs = inst.costs();
    let searcher = Searcher::new(&costs);
    let k = prefs.len();

    let run = |idx: usize, warm: Option<&[usize]>| -> PreferenceRun {
        run_preference(&searcher, &prefs[idx], idx, k, warm, cfg)
    };

    let runs: Vec<PreferenceRun> = if cfg.warm_start {
        let mut runs: Vec<PreferenceRun> = Vec::with_capacity(k);
        for idx in 0..k {
            let warm = runs.last().map(|r| r.solution.tour.as_slice().to_vec());
            runs.push(run(idx, warm.as_deref()));
        }
        runs
    } else {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..k).into_par_iter().map(|idx| run(idx, None)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..k).map(|idx| run(idx, None)).collect()
        }
    };

    let mut archive = ParetoArchive::new();
    let mut per_preference = Vec::with_capacity(k);
    let mut evaluations = 0;
    let mut lambdas = Vec::with_capacity(k);
    for r in runs {
        archive.merge(r.archive);
        evaluations += r.evaluations;
        lambdas.push(r.solution.lambda);
        per_preference.push(r.solution);
    }
    let multipliers = MultiplierState::with_lambdas(lambdas, cfg.alpha, 0.0, cfg.lambda_max)?;
    Ok(FrontSolution { archive, per_preference, multipliers, evaluations })
}

struct PreferenceRun {
    solution: PreferenceSolution,
    archive: ParetoArchive,
    evaluations: usize,
}

fn run_preference(
    searcher: &Searcher<'_>,
    w: &PreferenceVector,
    idx: usize,
    k: usize,
    warm: Option<&[usize]>,
    cfg: &SearchConfig,
) -> PreferenceRun {
    let costs = searcher.costs;
    let mut rng = cfg.seed.stream(idx as u64);
    let mut archive = ParetoArchive::new();
    let mut evaluations = 0;
    let mut mult = cfg.multipliers(k);

    let nn = searcher.weighted_start(w.w1(), w.w2());
    let mut start = nn;
    if let Some(warm) = warm {
        let (fs, fw) = (costs.evaluate(&start), costs.evaluate(warm));
        if lagrangian(&fw, w, 0.0) < lagrangian(&fs, w, 0.0) {
            start = warm.to_vec();
        }
    }

    // Preferred report: on-cone (g <= epsilon) with minimal norm, otherwise
    // minimal g.
    let rank = |f: &ObjectiveVector| {
        let g = cone_g(f, w);
        if g <= cfg.epsilon_g {
            (0u8, f.norm())
        } else {
            (1u8, g)
        }
    };
    let mut best: Option<(Vec<usize>, ObjectiveVector, f64)> = None;

    for restart in 0..cfg.restarts {
        mult.reset();
        let mut tour = if restart == 0 { start.clone() } else { Tour::random(costs.n(), &mut rng).into_inner() };
        let mut f = costs.evaluate(&tour);
        {
            let mut visit = archive_visitor(costs, &mut archive);
            visit(f, &|| tour.clone());
        }
        for _ in 0..cfg.outer_rounds {
            let lambda = mult.lambda(idx);
            let score = |f: &ObjectiveVector| lagrangian(f, w, lambda);
            let mut visit = archive_visitor(costs, &mut archive);
            let d = descend(costs, &searcher.moves, &mut tour, &mut f, &score, cfg.inner_moves, &mut rng, &mut visit);
            evaluations += d.evaluations;
            mult.ascend(idx, &[cone_g(&f, w)]);
            if best.as_ref().is_none_or(|(_, bf, _)| rank(&f) < rank(bf)) {
                best = Some((tour.clone(), f, mult.lambda(idx)));
            }
        }
    }
    let (tour, objectives, lambda) = best.expect("at least one round");
    PreferenceRun {
        solution: PreferenceSolution {
            tour: Tour::from_canonical_unchecked(tour),
            objectives,
            g: cone_g(&objectives, w),
            lambda,
        },
        archive,
        evaluations,
    }
}

/// Random tours of `n` cities, evaluated; shared baseline for tests and reports.
pub fn random_tour_archive<R: Rng + ?Sized>(inst: &BtspInstance, count: usize, rng: &mut R) -> ParetoArchive {
    let costs = inst.costs();
    (0..count)
        .map(|_| {
            let t = Tour::random(costs.n(), rng);
            let f = costs.evaluate(t.as_slice());
            (t, f)
        })
        .collect()
}
