use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::instance::Matrix;

/// Statistics of one city's incident edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeStat {
    pub sum: f64,
    pub min: f64,
    pub max: f64,
}

/// Per-city edge-weight statistics of one objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFeatures(pub Vec<NodeStat>);

impl NodeFeatures {
    pub fn get(&self, city: usize) -> NodeStat {
        self.0[city]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sum, min and max of the off-diagonal entries of each row.
pub fn node_features(a: &Matrix) -> Result<NodeFeatures> {
    let n = a.n();
    if n < 2 {
        return invalid(format!("need at least 2 cities, got {n}"));
    }
    let stats = (0..n)
        .map(|i| {
            let mut s = NodeStat { sum: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY };
            for (j, &v) in a.row(i).iter().enumerate() {
                if j != i {
                    s.sum += v;
                    s.min = s.min.min(v);
                    s.max = s.max.max(v);
                }
            }
            s
        })
        .collect();
    Ok(NodeFeatures(stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn row_statistics() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 5.0], vec![2.0, 5.0, 0.0]]).unwrap();
        let f = node_features(&a).unwrap();
        assert_eq!(f.get(0), NodeStat { sum: 3.0, min: 1.0, max: 2.0 });
        assert_eq!(f.get(2), NodeStat { sum: 7.0, min: 2.0, max: 5.0 });
    }

    #[test]
    fn constant_graph() {
        let c = 1.5;
        let a = Matrix::from_fn(6, |i, j| if i == j { 0.0 } else { c });
        for s in node_features(&a).unwrap().0 {
            assert_eq!(s, NodeStat { sum: c * 5.0, min: c, max: c });
        }
        assert!(node_features(&Matrix::zeros(1)).is_err());
    }

    #[test]
    fn random_matrix_matches_naive_loops() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let n = 9;
        let a = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { rng.gen_range(0.0..4.0) });
        let f = node_features(&a).unwrap();
        for i in 0..n {
            let others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| a.get(i, j)).collect();
            let sum: f64 = others.iter().sum();
            let min = others.iter().cloned().fold(f64::MAX, f64::min);
            let max = others.iter().cloned().fold(f64::MIN, f64::max);
            let s = f.get(i);
            assert!((s.sum - sum).abs() < 1e-12);
            assert_eq!((s.min, s.max), (min, max));
            assert!(s.min <= s.max && s.sum >= (n - 1) as f64 * s.min - 1e-12);
        }
    }
}
