//! Archive of mutually nondominated tours.

use serde::{Deserialize, Serialize};

use crate::objective::{dominates, ObjectiveVector};
use crate::tour::Tour;

/// One archived solution. Serializes as `{"tour": [...], "f1": .., "f2": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub tour: Tour,
    pub f1: f64,
    pub f2: f64,
}

impl ArchiveEntry {
    pub fn objectives(&self) -> ObjectiveVector {
        ObjectiveVector::new(self.f1, self.f2)
    }
}

/// Mutually nondominated `(tour, objectives)` pairs, kept sorted by
/// increasing `f1` (hence strictly decreasing `f2`). An entry whose
/// objectives equal an existing entry's is rejected, so the first tour to
/// reach a point keeps it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<ArchiveEntry>", into = "Vec<ArchiveEntry>")]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(ArchiveEntry::objectives).collect()
    }

    /// Whether inserting a point with objectives `f` would change the archive.
    pub fn accepts(&self, f: &ObjectiveVector) -> bool {
        let idx = self.entries.partition_point(|e| e.f1 <= f.f1);
        // entries[idx - 1] has the smallest f2 among entries with f1 <= f.f1.
        idx == 0 || self.entries[idx - 1].f2 > f.f2
    }

    /// Inserts `(tour, f)` if nondominated and not an objective duplicate,
    /// dropping every entry it dominates. Returns whether it was added.
    pub fn insert(&mut self, tour: Tour, f: ObjectiveVector) -> bool {
        self.insert_with(f, || tour)
    }

    /// Like [`Self::insert`] but only builds the tour when it will be kept.
    pub fn insert_with(&mut self, f: ObjectiveVector, tour: impl FnOnce() -> Tour) -> bool {
        if !self.accepts(&f) {
            return false;
        }
        let start = self.entries.partition_point(|e| e.f1 < f.f1);
        let end = start + self.entries[start..].partition_point(|e| e.f2 >= f.f2);
        debug_assert!(self.entries[start..end].iter().all(|e| dominates(&f, &e.objectives())));
        self.entries.splice(start..end, std::iter::once(ArchiveEntry { tour: tour(), f1: f.f1, f2: f.f2 }));
        true
    }

    /// Inserts every entry of `other`, in its order.
    pub fn merge(&mut self, other: ParetoArchive) {
        for e in other.entries {
            let f = e.objectives();
            self.insert(e.tour, f);
        }
    }

    /// Checks the archive invariant from scratch (pairwise).
    pub fn is_mutually_nondominated(&self) -> bool {
        let pts = self.objectives();
        pts.iter().enumerate().all(|(i, a)| {
            pts.iter().enumerate().all(|(j, b)| i == j || (!dominates(b, a) && a != b))
        })
    }
}

impl From<Vec<ArchiveEntry>> for ParetoArchive {
    fn from(entries: Vec<ArchiveEntry>) -> Self {
        let mut a = Self::new();
        for e in entries {
            let f = e.objectives();
            a.insert(e.tour, f);
        }
        a
    }
}

impl From<ParetoArchive> for Vec<ArchiveEntry> {
    fn from(a: ParetoArchive) -> Self {
        a.entries
    }
}

impl FromIterator<(Tour, ObjectiveVector)> for ParetoArchive {
    fn from_iter<I: IntoIterator<Item = (Tour, ObjectiveVector)>>(iter: I) -> Self {
        let mut a = Self::new();
        for (t, f) in iter {
            a.insert(t, f);
        }
        a
    }
}
