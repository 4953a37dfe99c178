use rand::Rng;

use super::operators::{inversion_mutation, order_crossover};
use super::EvoConfig;
use crate::archive::ParetoArchive;
use crate::error::{invalid, Result};
use crate::instance::{BtspInstance, CostMatrices};
use crate::objective::{dominates, ObjectiveVector};
use crate::tour::Tour;

/// Full record of one NSGA-II run.
#[derive(Debug, Clone)]
pub struct Nsga2Run {
    /// Every nondominated evaluation seen during the run.
    pub archive: ParetoArchive,
    pub evaluations: usize,
    pub generations: usize,
    /// Best `(f1, f2)` in the population after each generation, starting
    /// with the initial population.
    pub best_per_generation: Vec<(f64, f64)>,
    /// Objectives of the final population.
    pub final_population: Vec<ObjectiveVector>,
}

/// NSGA-II with order crossover and inversion mutation.
pub fn nsga2(inst: &BtspInstance, cfg: &EvoConfig) -> Result<ParetoArchive> {
    Ok(nsga2_run(inst, cfg)?.archive)
}

/// [`nsga2`] returning the full run record.
pub fn nsga2_run(inst: &BtspInstance, cfg: &EvoConfig) -> Result<Nsga2Run> {
    cfg.validate()?;
    let mut rng = cfg.seed.rng();
    let n = inst.n();
    let init = (0..cfg.population).map(|_| Tour::random(n, &mut rng)).collect();
    run(inst, cfg, init, rng)
}

/// [`nsga2_run`] from a caller-supplied initial population.
pub fn nsga2_from_population(inst: &BtspInstance, cfg: &EvoConfig, population: Vec<Tour>) -> Result<Nsga2Run> {
    cfg.validate()?;
    if population.len() != cfg.population {
        return invalid(format!("initial population has {} tours, expected {}", population.len(), cfg.population));
    }
    if population.iter().any(|t| t.len() != inst.n()) {
        return invalid("initial tour length does not match the instance");
    }
    run(inst, cfg, population, cfg.seed.rng())
}

#[derive(Clone)]
struct Individual {
    tour: Vec<usize>,
    f: ObjectiveVector,
    rank: usize,
    crowding: f64,
}

struct Evaluator<'a> {
    costs: CostMatrices,
    archive: &'a mut ParetoArchive,
    used: usize,
}

impl Evaluator<'_> {
    fn eval(&mut self, tour: Vec<usize>) -> Individual {
        let f = self.costs.evaluate(&tour);
        self.used += 1;
        if self.archive.accepts(&f) {
            self.archive.insert(Tour::from_canonical_unchecked(tour.clone()), f);
        }
        Individual { tour, f, rank: 0, crowding: 0.0 }
    }
}

fn run<R: Rng>(inst: &BtspInstance, cfg: &EvoConfig, init: Vec<Tour>, mut rng: R) -> Result<Nsga2Run> {
    let mut archive = ParetoArchive::new();
    let mut ev = Evaluator { costs: inst.costs(), archive: &mut archive, used: 0 };
    let mut pop: Vec<Individual> = init.into_iter().map(|t| ev.eval(t.into_inner())).collect();
    assign_rank_and_crowding(&mut pop);
    let mut history = vec![best_of(&pop)];
    let mut generations = 0;

    while ev.used < cfg.evaluations {
        let offspring_count = cfg.population.min(cfg.evaluations - ev.used);
        let mut offspring = Vec::with_capacity(offspring_count);
        while offspring.len() < offspring_count {
            let a = tournament(&pop, &mut rng);
            let b = tournament(&pop, &mut rng);
            let mut child = if rng.gen_bool(cfg.crossover_rate) {
                order_crossover(&pop[a].tour, &pop[b].tour, &mut rng)
            } else {
                pop[a].tour.clone()
            };
            if rng.gen_bool(cfg.mutation_rate) {
                inversion_mutation(&mut child, &mut rng);
            }
            offspring.push(ev.eval(child));
        }
        pop.extend(offspring);
        pop = environmental_selection(pop, cfg.population);
        generations += 1;
        history.push(best_of(&pop));
    }
    let evaluations = ev.used;
    let final_population = pop.iter().map(|i| i.f).collect();
    Ok(Nsga2Run { archive, evaluations, generations, best_per_generation: history, final_population })
}

fn best_of(pop: &[Individual]) -> (f64, f64) {
    pop.iter().fold((f64::INFINITY, f64::INFINITY), |(a, b), i| (a.min(i.f.f1), b.min(i.f.f2)))
}

/// Binary tournament on (rank, then larger crowding distance).
fn tournament<R: Rng>(pop: &[Individual], rng: &mut R) -> usize {
    let (a, b) = (rng.gen_range(0..pop.len()), rng.gen_range(0..pop.len()));
    let better = |x: &Individual, y: &Individual| x.rank < y.rank || (x.rank == y.rank && x.crowding > y.crowding);
    if better(&pop[b], &pop[a]) {
        b
    } else {
        a
    }
}

fn assign_rank_and_crowding(pop: &mut [Individual]) {
    let objs: Vec<ObjectiveVector> = pop.iter().map(|i| i.f).collect();
    for (rank, front) in fast_nondominated_sort(&objs).into_iter().enumerate() {
        let pts: Vec<ObjectiveVector> = front.iter().map(|&i| objs[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&pts)) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
}

/// Keeps the best `size` individuals by front, breaking the last front by
/// crowding distance (larger first, then index).
fn environmental_selection(mut pop: Vec<Individual>, size: usize) -> Vec<Individual> {
    assign_rank_and_crowding(&mut pop);
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&a, &b| {
        pop[a].rank.cmp(&pop[b].rank).then(pop[b].crowding.total_cmp(&pop[a].crowding)).then(a.cmp(&b))
    });
    idx.truncate(size);
    idx.sort_unstable();
    let mut keep = vec![false; pop.len()];
    for &i in &idx {
        keep[i] = true;
    }
    let mut next: Vec<Individual> = pop.into_iter().zip(keep).filter_map(|(ind, k)| k.then_some(ind)).collect();
    assign_rank_and_crowding(&mut next);
    next
}

/// Fronts of indices: front 0 is nondominated, front 1 is nondominated once
/// front 0 is removed, and so on.
pub fn fast_nondominated_sort(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each point within one front; boundary points get
/// infinity.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for get in [|p: &ObjectiveVector| p.f1, |p: &ObjectiveVector| p.f2] {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| get(&front[a]).total_cmp(&get(&front[b])).then(a.cmp(&b)));
        let (lo, hi) = (get(&front[order[0]]), get(&front[order[n - 1]]));
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..n - 1 {
                dist[order[w]] += (get(&front[order[w + 1]]) - get(&front[order[w - 1]])) / (hi - lo);
            }
        }
    }
    dist
}
