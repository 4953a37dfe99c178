//! Comparison algorithms: NSGA-II, MOEA/D with weighted-sum subproblems,
//! and weighted-sum local search.

mod moead;
mod nsga2;
mod operators;
mod weighted_sum;

use serde::{Deserialize, Serialize};

pub use moead::{moead, moead_run, MoeadRun};
pub use nsga2::{crowding_distance, fast_nondominated_sort, nsga2, nsga2_from_population, nsga2_run, Nsga2Run};
pub use weighted_sum::{uniform_weights, weighted_sum, ConvexWeight};

use crate::error::{invalid, Result};
use crate::rng::RngSeed;

/// Settings shared by the evolutionary baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvoConfig {
    pub population: usize,
    /// Objective-evaluation budget.
    pub evaluations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// MOEA/D neighbourhood size.
    pub neighborhood_t: usize,
    pub seed: RngSeed,
}

impl Default for EvoConfig {
    fn default() -> Self {
        Self {
            population: 100,
            evaluations: 20_000,
            crossover_rate: 0.9,
            mutation_rate: 0.9,
            neighborhood_t: 10,
            seed: RngSeed(0),
        }
    }
}

impl EvoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 || self.population % 2 != 0 {
            return invalid(format!("population {} must be even and at least 4", self.population));
        }
        if self.evaluations < self.population {
            return invalid(format!("budget {} is below the population size {}", self.evaluations, self.population));
        }
        for (name, r) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return invalid(format!("{name} = {r} outside [0, 1]"));
            }
        }
        if self.neighborhood_t < 1 {
            return invalid("neighborhood_t must be at least 1");
        }
        Ok(())
    }
}
