use rand::Rng;

use super::operators::{inversion_mutation, order_crossover};
use super::EvoConfig;
use crate::archive::ParetoArchive;
use crate::error::{invalid, Result};
use crate::instance::BtspInstance;
use crate::objective::ObjectiveVector;
use crate::tour::Tour;

/// Full record of one MOEA/D run.
#[derive(Debug, Clone)]
pub struct MoeadRun {
    /// Nondominated subproblem incumbents at the end of the run.
    pub archive: ParetoArchive,
    pub evaluations: usize,
    /// Convex weights `(a1, a2)` of the subproblems.
    pub weights: Vec<(f64, f64)>,
    /// Incumbent of each subproblem.
    pub incumbents: Vec<(Tour, ObjectiveVector)>,
}

/// MOEA/D over `k` weighted-sum subproblems.
pub fn moead(inst: &BtspInstance, cfg: &EvoConfig, k: usize) -> Result<ParetoArchive> {
    Ok(moead_run(inst, cfg, k)?.archive)
}

/// [`moead`] returning the full run record.
///
/// Subproblem `i` minimizes `a1 f1 + a2 f2` with `a1 = i / (k - 1)`. Each
/// generation visits the subproblems in order: two parents are drawn from
/// the `T` nearest weight vectors, recombined by order crossover and
/// mutated by inversion, and the child replaces every neighbouring
/// incumbent it improves.
pub fn moead_run(inst: &BtspInstance, cfg: &EvoConfig, k: usize) -> Result<MoeadRun> {
    cfg.validate()?;
    if k < 2 {
        return invalid(format!("MOEA/D needs at least 2 subproblems, got {k}"));
    }
    if cfg.evaluations < k {
        return invalid(format!("budget {} cannot evaluate {k} initial subproblems", cfg.evaluations));
    }
    let costs = inst.costs();
    let mut rng = cfg.seed.rng();
    let weights: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let a = i as f64 / (k - 1) as f64;
            (a, 1.0 - a)
        })
        .collect();
    let t = cfg.neighborhood_t.min(k);
    let neighbours: Vec<Vec<usize>> = weights
        .iter()
        .map(|&(a, _)| {
            let mut idx: Vec<usize> = (0..k).collect();
            idx.sort_by(|&x, &y| (weights[x].0 - a).abs().total_cmp(&(weights[y].0 - a).abs()).then(x.cmp(&y)));
            idx.truncate(t);
            idx
        })
        .collect();
    let scalar = |f: &ObjectiveVector, i: usize| weights[i].0 * f.f1 + weights[i].1 * f.f2;

    let mut used = 0;
    let mut pop: Vec<(Vec<usize>, ObjectiveVector)> = (0..k)
        .map(|_| {
            let tour = Tour::random(costs.n(), &mut rng).into_inner();
            used += 1;
            let f = costs.evaluate(&tour);
            (tour, f)
        })
        .collect();

    'outer: loop {
        for i in 0..k {
            if used >= cfg.evaluations {
                break 'outer;
            }
            let hood = &neighbours[i];
            let a = hood[rng.gen_range(0..hood.len())];
            let b = hood[rng.gen_range(0..hood.len())];
            let mut child = if rng.gen_bool(cfg.crossover_rate) {
                order_crossover(&pop[a].0, &pop[b].0, &mut rng)
            } else {
                pop[a].0.clone()
            };
            if rng.gen_bool(cfg.mutation_rate) {
                inversion_mutation(&mut child, &mut rng);
            }
            let f = costs.evaluate(&child);
            used += 1;
            for &j in hood {
                if scalar(&f, j) < scalar(&pop[j].1, j) {
                    pop[j] = (child.clone(), f);
                }
            }
        }
    }

    let incumbents: Vec<(Tour, ObjectiveVector)> =
        pop.into_iter().map(|(t, f)| (Tour::from_canonical_unchecked(t), f)).collect();
    let archive = incumbents.iter().cloned().collect();
    Ok(MoeadRun { archive, evaluations: used, weights, incumbents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_euclidean;
    use crate::rng::RngSeed;
    use crate::tour::all_canonical_tours;

    fn euclid(n: usize, seed: u64) -> BtspInstance {
        gen_euclidean(n, RngSeed(seed)).unwrap().into()
    }

    #[test]
    fn five_city_archive_is_weighted_sum_supported() {
        for seed in 0..10 {
            let inst = euclid(5, seed);
            let all: Vec<ObjectiveVector> = all_canonical_tours(5).iter().map(|t| inst.evaluate(t).unwrap()).collect();
            let cfg = EvoConfig { population: 10, evaluations: 3000, seed: RngSeed(seed), ..Default::default() };
            let run = moead_run(&inst, &cfg, 11).unwrap();
            for p in run.archive.objectives() {
                // p must minimize some subproblem's weighted sum over all tours.
                let supported = run.weights.iter().any(|&(a1, a2)| {
                    let best = all.iter().map(|q| a1 * q.f1 + a2 * q.f2).fold(f64::INFINITY, f64::min);
                    a1 * p.f1 + a2 * p.f2 <= best + 1e-12
                });
                assert!(supported, "seed {seed}: {p:?} is not a weighted-sum optimum");
            }
        }
    }

    #[test]
    fn extreme_weights_find_single_objective_minima() {
        for seed in 0..5 {
            let inst = euclid(6, 100 + seed);
            let all: Vec<ObjectiveVector> = all_canonical_tours(6).iter().map(|t| inst.evaluate(t).unwrap()).collect();
            let min1 = all.iter().map(|f| f.f1).fold(f64::INFINITY, f64::min);
            let min2 = all.iter().map(|f| f.f2).fold(f64::INFINITY, f64::min);
            let cfg = EvoConfig { population: 10, evaluations: 2000, neighborhood_t: 2, seed: RngSeed(seed), ..Default::default() };
            let run = moead_run(&inst, &cfg, 2).unwrap();
            // Weight 0 is (0, 1): minimizes f2; weight 1 is (1, 0): minimizes f1.
            assert!((run.incumbents[0].1.f2 - min2).abs() < 1e-9);
            assert!((run.incumbents[1].1.f1 - min1).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_and_within_budget() {
        let inst = euclid(15, 3);
        let cfg = EvoConfig { evaluations: 1500, seed: RngSeed(8), ..Default::default() };
        let a = moead_run(&inst, &cfg, 20).unwrap();
        let b = moead_run(&inst, &cfg, 20).unwrap();
        assert_eq!(a.archive, b.archive);
        assert_eq!(a.evaluations, 1500);
        assert!(a.archive.is_mutually_nondominated());
        assert!(moead(&inst, &cfg, 1).is_err());
    }
}
