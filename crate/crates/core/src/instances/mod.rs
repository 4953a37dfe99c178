//! Instance generators, the grid-map coverage pipeline, node features and
//! the instance file format.

mod features;
mod grid;
mod io;

use rand::Rng;

pub use features::{node_features, NodeFeatures, NodeStat};
pub use grid::{apsp_astar, gen_gridmap, sample_poi, Cell, GridMap};
pub use io::{GridMapFile, InstanceFile, INSTANCE_SCHEMA_VERSION};

use crate::error::{invalid, Result};
use crate::instance::{AdjacencyInstance, EuclideanInstance, Matrix};
use crate::rng::RngSeed;

/// `n` cities with four independent uniform `[0, 1)` coordinates each.
pub fn gen_euclidean(n: usize, seed: RngSeed) -> Result<EuclideanInstance> {
    if n < 2 {
        return invalid(format!("need at least 2 cities, got {n}"));
    }
    let mut rng = seed.rng();
    let coords = (0..n).map(|_| std::array::from_fn(|_| rng.gen::<f64>())).collect();
    EuclideanInstance::new(coords)
}

/// Euclidean distances between `n` uniform points of the unit square.
pub fn gen_second_adjacency(n: usize, seed: RngSeed) -> Result<Matrix> {
    if n < 2 {
        return invalid(format!("need at least 2 cities, got {n}"));
    }
    let mut rng = seed.rng();
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    Ok(Matrix::from_fn(n, |i, j| {
        let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
        (dx * dx + dy * dy).sqrt()
    }))
}

/// A coverage-planning instance together with the map and points it came from.
#[derive(Debug, Clone)]
pub struct CoverageInstance {
    pub map: GridMap,
    pub points: Vec<Cell>,
    pub instance: AdjacencyInstance,
}

/// Grid map, `n` points of interest, A* path lengths as the first objective
/// and a random planar metric as the second.
pub fn gen_coverage(width: usize, height: usize, density: f64, n: usize, seed: RngSeed) -> Result<CoverageInstance> {
    let map = gen_gridmap(width, height, density, seed.derive(1))?;
    let points = sample_poi(&map, n, seed.derive(2))?;
    let a1 = apsp_astar(&map, &points)?;
    let a2 = gen_second_adjacency(n, seed.derive(3))?;
    let instance = AdjacencyInstance::new(a1, a2)?;
    Ok(CoverageInstance { map, points, instance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_deterministic_and_in_range() {
        let a = gen_euclidean(50, RngSeed(4)).unwrap();
        let b = gen_euclidean(50, RngSeed(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_euclidean(50, RngSeed(5)).unwrap());
        let big = gen_euclidean(1000, RngSeed(1)).unwrap();
        assert!(big.coords().iter().flatten().all(|v| (0.0..1.0).contains(v)));
        assert!(gen_euclidean(1, RngSeed(1)).is_err());
    }

    #[test]
    fn euclidean_coordinate_means() {
        let inst = gen_euclidean(10_000, RngSeed(99)).unwrap();
        for d in 0..4 {
            let mean = inst.coords().iter().map(|c| c[d]).sum::<f64>() / 10_000.0;
            assert!((0.49..=0.51).contains(&mean), "coordinate {d} mean {mean}");
        }
    }

    #[test]
    fn second_adjacency_is_a_bounded_metric() {
        let a = gen_second_adjacency(30, RngSeed(8)).unwrap();
        a.check_adjacency("A2").unwrap();
        assert!(a.upper_entries().all(|v| v <= 2f64.sqrt()));
        for i in 0..30 {
            for j in 0..30 {
                for k in 0..30 {
                    assert!(a.get(i, k) <= a.get(i, j) + a.get(j, k) + 1e-12);
                }
            }
        }
        assert!(gen_second_adjacency(1, RngSeed(0)).is_err());
    }

    #[test]
    fn coverage_pipeline_is_deterministic() {
        let a = gen_coverage(12, 10, 0.2, 8, RngSeed(3)).unwrap();
        let b = gen_coverage(12, 10, 0.2, 8, RngSeed(3)).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.points, b.points);
        assert_eq!(a.instance.n(), 8);
    }
}
