use crate::archive::ParetoArchive;
use crate::error::{invalid, Result};
use crate::instance::BtspInstance;
use crate::objective::ObjectiveVector;
use crate::search::moves::descend;
use crate::search::{SearchConfig, Searcher};
use crate::tour::Tour;

/// Convex weight pair `(a1, a2)`, `a1 + a2 = 1`, both nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexWeight {
    a1: f64,
    a2: f64,
}

impl ConvexWeight {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !(a1 >= 0.0 && a2 >= 0.0) || (a1 + a2 - 1.0).abs() > 1e-9 {
            return invalid(format!("({a1}, {a2}) is not a convex weight pair"));
        }
        Ok(Self { a1, a2 })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn scalarize(&self, f: &ObjectiveVector) -> f64 {
        self.a1 * f.f1 + self.a2 * f.f2
    }
}

/// `count` weights `a1 = i / (count - 1)`; a single weight is `(0.5, 0.5)`.
pub fn uniform_weights(count: usize) -> Vec<ConvexWeight> {
    match count {
        0 => Vec::new(),
        1 => vec![ConvexWeight { a1: 0.5, a2: 0.5 }],
        _ => (0..count)
            .map(|i| {
                let a = i as f64 / (count - 1) as f64;
                ConvexWeight { a1: a, a2: 1.0 - a }
            })
            .collect(),
    }
}

/// Linear scalarization baseline: for each weight, local search on
/// `a1 f1 + a2 f2` with the 2-opt / Or-opt neighbourhoods, keeping the best
/// of `cfg.restarts` descents of `outer_rounds * inner_moves` evaluations.
/// Only the per-weight winners are archived.
pub fn weighted_sum(inst: &BtspInstance, weights: &[ConvexWeight], cfg: &SearchConfig) -> Result<ParetoArchive> {
    cfg.validate()?;
    let costs = inst.costs();
    let searcher = Searcher::new(&costs);
    let budget = cfg.outer_rounds.saturating_mul(cfg.inner_moves);
    let mut archive = ParetoArchive::new();
    for (idx, w) in weights.iter().enumerate() {
        let mut rng = cfg.seed.stream(idx as u64);
        let score = |f: &ObjectiveVector| w.scalarize(f);
        let mut best: Option<(Vec<usize>, ObjectiveVector)> = None;
        for restart in 0..cfg.restarts {
            let mut tour = if restart == 0 {
                searcher.weighted_start(w.a1, w.a2)
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
        archive.insert(Tour::from_canonical_unchecked(tour), f);
    }
    Ok(archive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{AdjacencyInstance, Matrix};
    use crate::instances::gen_euclidean;
    use crate::rng::RngSeed;
    use crate::tour::all_canonical_tours;

    #[test]
    fn weight_validation() {
        assert!(ConvexWeight::new(0.3, 0.7).is_ok());
        assert!(ConvexWeight::new(0.3, 0.6).is_err());
        assert!(ConvexWeight::new(-0.1, 1.1).is_err());
        let w = uniform_weights(5);
        assert_eq!(w.len(), 5);
        assert_eq!((w[0].a1(), w[4].a1()), (0.0, 1.0));
    }

    #[test]
    fn pure_first_objective_matches_exhaustive_minimum() {
        for seed in 0..5 {
            let inst: BtspInstance = gen_euclidean(6, RngSeed(seed)).unwrap().into();
            let min1 = all_canonical_tours(6).iter().map(|t| inst.evaluate(t).unwrap().f1).fold(f64::INFINITY, f64::min);
            let cfg = SearchConfig { restarts: 5, ..Default::default() };
            let a = weighted_sum(&inst, &[ConvexWeight::new(1.0, 0.0).unwrap()], &cfg).unwrap();
            assert!((a.entries()[0].f1 - min1).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_objectives_reduce_to_single_objective() {
        let n = 12;
        let e = gen_euclidean(n, RngSeed(7)).unwrap();
        let m = Matrix::from_fn(n, |i, j| e.distance(0, i, j));
        let inst = BtspInstance::from(AdjacencyInstance::new(m.clone(), m).unwrap());
        let cfg = SearchConfig::default();
        let half = weighted_sum(&inst, &[ConvexWeight::new(0.5, 0.5).unwrap()], &cfg).unwrap();
        let pure = weighted_sum(&inst, &[ConvexWeight::new(1.0, 0.0).unwrap()], &cfg).unwrap();
        assert!((half.entries()[0].f1 - pure.entries()[0].f1).abs() < 1e-9);
    }

    #[test]
    fn hundred_weights_give_a_nondominated_archive() {
        let inst: BtspInstance = gen_euclidean(20, RngSeed(1)).unwrap().into();
        let cfg = SearchConfig { restarts: 1, outer_rounds: 1, inner_moves: 500, ..Default::default() };
        let a = weighted_sum(&inst, &uniform_weights(100), &cfg).unwrap();
        assert!(!a.is_empty() && a.is_mutually_nondominated());
    }
}
