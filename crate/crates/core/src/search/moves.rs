//! 2-opt and Or-opt neighbourhoods over canonical tours with constant-time
//! objective deltas. City 0 never moves, so tours stay canonical.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::instance::{CostMatrices, Matrix};
use crate::objective::ObjectiveVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Move {
    /// Reverse positions `i..=j`.
    TwoOpt { i: usize, j: usize },
    /// Cut `len` cities starting at position `i` and reinsert them after
    /// index `after` of the remaining sequence, optionally reversed.
    OrOpt { i: usize, len: usize, after: usize, reversed: bool },
}

pub(crate) const MAX_SEGMENT: usize = 3;

/// Every non-trivial move for an `n`-city tour.
pub(crate) fn all_moves(n: usize) -> Vec<Move> {
    let mut moves = Vec::new();
    if n < 4 {
        return moves;
    }
    for i in 1..n - 1 {
        for j in (i + 1)..n {
            // Reversing everything after city 0 is the same cycle.
            if !(i == 1 && j == n - 1) {
                moves.push(Move::TwoOpt { i, j });
            }
        }
    }
    for len in 1..=MAX_SEGMENT.min(n - 2) {
        for i in 1..=(n - len) {
            for after in 0..(n - len) {
                if after == i - 1 {
                    continue;
                }
                moves.push(Move::OrOpt { i, len, after, reversed: false });
                if len > 1 {
                    moves.push(Move::OrOpt { i, len, after, reversed: true });
                }
            }
        }
    }
    moves
}

#[inline]
fn edge_delta(m: &Matrix, t: &[usize], mv: Move) -> f64 {
    let n = t.len();
    match mv {
        Move::TwoOpt { i, j } => {
            let (a, b, c, d) = (t[i - 1], t[i], t[j], t[(j + 1) % n]);
            m.get(a, c) + m.get(b, d) - m.get(a, b) - m.get(c, d)
        }
        Move::OrOpt { i, len, after, reversed } => {
            let (s0, s1) = (t[i], t[i + len - 1]);
            let (p, q) = (t[i - 1], t[(i + len) % n]);
            // Remaining-sequence index to original position.
            let pos = |r: usize| if r < i { r } else { r + len };
            let u = t[pos(after)];
            let v = t[pos((after + 1) % (n - len))];
            let (head, tail) = if reversed { (s1, s0) } else { (s0, s1) };
            m.get(p, q) - m.get(p, s0) - m.get(s1, q) + m.get(u, head) + m.get(tail, v) - m.get(u, v)
        }
    }
}

/// Objective change caused by applying `mv` to `t`.
#[inline]
pub(crate) fn delta(costs: &CostMatrices, t: &[usize], mv: Move) -> ObjectiveVector {
    ObjectiveVector::new(edge_delta(&costs.d1, t, mv), edge_delta(&costs.d2, t, mv))
}

/// `t` with `mv` applied.
pub(crate) fn apply(t: &[usize], mv: Move) -> Vec<usize> {
    match mv {
        Move::TwoOpt { i, j } => {
            let mut out = t.to_vec();
            out[i..=j].reverse();
            out
        }
        Move::OrOpt { i, len, after, reversed } => {
            let mut seg: Vec<usize> = t[i..i + len].to_vec();
            if reversed {
                seg.reverse();
            }
            let mut rest: Vec<usize> = Vec::with_capacity(t.len());
            rest.extend_from_slice(&t[..i]);
            rest.extend_from_slice(&t[i + len..]);
            rest.splice(after + 1..after + 1, seg);
            rest
        }
    }
}

/// Nearest-neighbour tour from city 0 under edge costs `m`; ties go to the
/// lower city index.
pub(crate) fn nearest_neighbour(m: &Matrix) -> Vec<usize> {
    let n = m.n();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = 0;
    visited[0] = true;
    order.push(0);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| m.get(cur, a).total_cmp(&m.get(cur, b)))
            .expect("an unvisited city remains");
        visited[next] = true;
        order.push(next);
        cur = next;
    }
    order
}

/// Outcome of one first-improvement descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Descent {
    pub evaluations: usize,
    pub local_optimum: bool,
}

/// First-improvement descent over the full neighbourhood in a random order.
///
/// Scans moves cyclically from a shuffled order, accepting any move that
/// strictly lowers `score`. Stops after `budget` candidate evaluations or a
/// full cycle without improvement. Each candidate's objectives are passed to
/// `visit` together with a closure that materializes the candidate tour.
#[allow(clippy::too_many_arguments)]
pub(crate) fn descend<R: Rng + ?Sized>(
    costs: &CostMatrices,
    moves: &[Move],
    tour: &mut Vec<usize>,
    f: &mut ObjectiveVector,
    score: &dyn Fn(&ObjectiveVector) -> f64,
    budget: usize,
    rng: &mut R,
    visit: &mut dyn FnMut(ObjectiveVector, &dyn Fn() -> Vec<usize>),
) -> Descent {
    if moves.is_empty() {
        return Descent { evaluations: 0, local_optimum: true };
    }
    let mut order: Vec<usize> = (0..moves.len()).collect();
    order.shuffle(rng);
    let mut current = score(f);
    let (mut used, mut since_improve, mut cursor) = (0, 0, 0);
    while used < budget && since_improve < moves.len() {
        let mv = moves[order[cursor]];
        cursor = (cursor + 1) % order.len();
        used += 1;
        let d = delta(costs, tour, mv);
        let cand = ObjectiveVector::new(f.f1 + d.f1, f.f2 + d.f2);
        {
            let t: &[usize] = tour;
            visit(cand, &|| apply(t, mv));
        }
        if score(&cand) < current - 1e-12 * current.abs() {
            let next = apply(tour, mv);
            let exact = costs.evaluate(&next);
            let s = score(&exact);
            if s < current {
                *tour = next;
                *f = exact;
                current = s;
                since_improve = 0;
                continue;
            }
        }
        since_improve += 1;
    }
    Descent { evaluations: used, local_optimum: since_improve >= moves.len() }
}
