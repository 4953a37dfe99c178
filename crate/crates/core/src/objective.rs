//! Objective vectors and Pareto dominance.

use serde::{Deserialize, Serialize};

/// Costs of one solution under both objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub f1: f64,
    pub f2: f64,
}

impl ObjectiveVector {
    pub const fn new(f1: f64, f2: f64) -> Self {
        Self { f1, f2 }
    }

    pub fn norm(&self) -> f64 {
        self.f1.hypot(self.f2)
    }

    pub fn is_finite(&self) -> bool {
        self.f1.is_finite() && self.f2.is_finite()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.f1 * c, self.f2 * c)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.f1 - other.f1).hypot(self.f2 - other.f2)
    }
}

impl From<(f64, f64)> for ObjectiveVector {
    fn from((f1, f2): (f64, f64)) -> Self {
        Self::new(f1, f2)
    }
}

/// `a` dominates `b`: no worse in both objectives and strictly better in one.
///
/// Comparisons are exact; callers that need a tolerance apply it themselves.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2)
}

/// Returns the nondominated subset of `points`, deduplicated and sorted by
/// increasing `f1`.
pub fn nondominated_filter(points: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut sorted: Vec<ObjectiveVector> = points.to_vec();
    sorted.sort_by(|a, b| a.f1.total_cmp(&b.f1).then(a.f2.total_cmp(&b.f2)));
    let mut front: Vec<ObjectiveVector> = Vec::new();
    for p in sorted {
        // Sorted by (f1, f2): p is dominated iff some earlier point has f2 <= p.f2.
        match front.last() {
            Some(last) if last.f2 <= p.f2 => {}
            _ => front.push(p),
        }
    }
    front
}
