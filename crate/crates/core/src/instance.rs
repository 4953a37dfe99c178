//! Bi-objective TSP instances and exact tour evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::objective::ObjectiveVector;
use crate::tour::check_permutation;

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid(format!("matrix rows must all have length {n}"));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Off-diagonal entries `(i, j)` with `i < j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| self.get(i, j)))
    }

    /// Zero diagonal, symmetric, finite and nonnegative.
    pub fn check_adjacency(&self, name: &str) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return invalid(format!("{name}: nonzero diagonal at {i}"));
            }
            for j in 0..self.n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return invalid(format!("{name}[{i}][{j}] = {v} is not a finite nonnegative weight"));
                }
                if v != self.get(j, i) {
                    return invalid(format!("{name} is not symmetric at ({i}, {j})"));
                }
            }
        }
        Ok(())
    }

    /// Closed-loop sum of entries along `order`, without validation.
    #[inline]
    pub fn tour_cost(&self, order: &[usize]) -> f64 {
        closed_sum(order, |i, j| self.get(i, j))
    }
}

/// Cities with one 2-D position per objective, coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanInstance {
    coords: Vec<[f64; 4]>,
}

impl EuclideanInstance {
    /// `coords[i] = [x1, y1, x2, y2]`.
    pub fn new(coords: Vec<[f64; 4]>) -> Result<Self> {
        if coords.len() < 2 {
            return invalid(format!("need at least 2 cities, got {}", coords.len()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.iter().any(|v| !(0.0..1.0).contains(v)) {
                return invalid(format!("city {i} has a coordinate outside [0, 1): {c:?}"));
            }
        }
        Ok(Self { coords })
    }

    /// Accepts any finite coordinates. For hand-built geometry outside the
    /// unit box; generated and loaded instances go through [`Self::new`].
    pub fn new_unbounded(coords: Vec<[f64; 4]>) -> Result<Self> {
        if coords.len() < 2 {
            return invalid(format!("need at least 2 cities, got {}", coords.len()));
        }
        if let Some(i) = coords.iter().position(|c| c.iter().any(|v| !v.is_finite())) {
            return invalid(format!("city {i} has a non-finite coordinate"));
        }
        Ok(Self { coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 4]] {
        &self.coords
    }

    /// Distance between cities `i` and `j` under objective `m` (0 or 1).
    #[inline]
    pub fn distance(&self, m: usize, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.coords[i], &self.coords[j]);
        let dx = a[2 * m] - b[2 * m];
        let dy = a[2 * m + 1] - b[2 * m + 1];
        (dx * dx + dy * dy).sqrt()
    }
}

/// Two symmetric edge-weight matrices over the same cities.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyInstance {
    a1: Matrix,
    a2: Matrix,
}

impl AdjacencyInstance {
    pub fn new(a1: Matrix, a2: Matrix) -> Result<Self> {
        if a1.n() < 2 {
            return invalid(format!("need at least 2 cities, got {}", a1.n()));
        }
        if a1.n() != a2.n() {
            return invalid(format!("matrix sizes differ: {} vs {}", a1.n(), a2.n()));
        }
        a1.check_adjacency("A1")?;
        a2.check_adjacency("A2")?;
        Ok(Self { a1, a2 })
    }

    pub fn n(&self) -> usize {
        self.a1.n()
    }

    pub fn a1(&self) -> &Matrix {
        &self.a1
    }

    pub fn a2(&self) -> &Matrix {
        &self.a2
    }
}

/// Either kind of bi-objective TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub enum BtspInstance {
    Euclidean(EuclideanInstance),
    Adjacency(AdjacencyInstance),
}

impl BtspInstance {
    pub fn n(&self) -> usize {
        match self {
            Self::Euclidean(e) => e.n(),
            Self::Adjacency(a) => a.n(),
        }
    }

    pub fn evaluate(&self, order: impl AsRef<[usize]>) -> Result<ObjectiveVector> {
        match self {
            Self::Euclidean(e) => evaluate_euclidean(order, e),
            Self::Adjacency(a) => evaluate_adjacency(order, a),
        }
    }

    /// Dense cost matrices for both objectives; the form every solver works on.
    pub fn costs(&self) -> CostMatrices {
        match self {
            Self::Euclidean(e) => CostMatrices {
                d1: Matrix::from_fn(e.n(), |i, j| e.distance(0, i, j)),
                d2: Matrix::from_fn(e.n(), |i, j| e.distance(1, i, j)),
            },
            Self::Adjacency(a) => CostMatrices { d1: a.a1.clone(), d2: a.a2.clone() },
        }
    }
}

impl From<EuclideanInstance> for BtspInstance {
    fn from(e: EuclideanInstance) -> Self {
        Self::Euclidean(e)
    }
}

impl From<AdjacencyInstance> for BtspInstance {
    fn from(a: AdjacencyInstance) -> Self {
        Self::Adjacency(a)
    }
}

/// Edge costs of both objectives. Entries for Euclidean instances are
/// computed exactly as [`EuclideanInstance::distance`] does, so tour sums
/// agree bit for bit with [`evaluate_euclidean`].
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrices {
    pub d1: Matrix,
    pub d2: Matrix,
}

impl CostMatrices {
    pub fn n(&self) -> usize {
        self.d1.n()
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> ObjectiveVector {
        ObjectiveVector::new(self.d1.get(i, j), self.d2.get(i, j))
    }

    /// Unchecked closed-loop cost of `order`.
    #[inline]
    pub fn evaluate(&self, order: &[usize]) -> ObjectiveVector {
        ObjectiveVector::new(self.d1.tour_cost(order), self.d2.tour_cost(order))
    }

    pub fn weighted(&self, w1: f64, w2: f64) -> Matrix {
        let n = self.n();
        Matrix::from_fn(n, |i, j| w1 * self.d1.get(i, j) + w2 * self.d2.get(i, j))
    }
}

/// Sum of `edge(i, j)` around the cycle, always starting at the smallest
/// city and heading towards its smaller neighbour. Rotations and reversals of
/// a tour therefore add the same terms in the same order and give identical
/// results, not merely equal up to rounding.
#[inline]
pub(crate) fn closed_sum(order: &[usize], edge: impl Fn(usize, usize) -> f64) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    let start = if order[0] == 0 {
        0
    } else {
        order.iter().enumerate().min_by_key(|&(_, &c)| c).map_or(0, |(p, _)| p)
    };
    let next = order[(start + 1) % n];
    let prev = order[(start + n - 1) % n];
    let mut total = 0.0;
    if next <= prev {
        for k in 0..n {
            total += edge(order[(start + k) % n], order[(start + k + 1) % n]);
        }
    } else {
        for k in 0..n {
            total += edge(order[(start + n - k) % n], order[(start + 2 * n - k - 1) % n]);
        }
    }
    total
}

fn check_tour(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return invalid(format!("tour has {} cities, instance has {n}", order.len()));
    }
    check_permutation(order)
}

/// Closed-loop Euclidean tour length under each objective's coordinates.
pub fn evaluate_euclidean(order: impl AsRef<[usize]>, inst: &EuclideanInstance) -> Result<ObjectiveVector> {
    let order = order.as_ref();
    check_tour(order, inst.n())?;
    Ok(ObjectiveVector::new(
        closed_sum(order, |i, j| inst.distance(0, i, j)),
        closed_sum(order, |i, j| inst.distance(1, i, j)),
    ))
}

/// Closed-loop sum of `A1` and `A2` edge weights.
pub fn evaluate_adjacency(order: impl AsRef<[usize]>, inst: &AdjacencyInstance) -> Result<ObjectiveVector> {
    let order = order.as_ref();
    check_tour(order, inst.n())?;
    Ok(ObjectiveVector::new(inst.a1.tour_cost(order), inst.a2.tour_cost(order)))
}
