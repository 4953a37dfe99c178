//! Tours: closed visiting orders canonicalized to start at city 0.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A permutation of `0..n` whose first element is city 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Tour(Vec<usize>);

impl Tour {
    /// Validates `order` as a permutation and rotates it so city 0 comes first.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        check_permutation(&order)?;
        Ok(Self::canonical(order))
    }

    /// Identity order `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut rest: Vec<usize> = (1..n).collect();
        rest.shuffle(rng);
        let mut order = Vec::with_capacity(n);
        order.push(0);
        order.extend(rest);
        Self(order)
    }

    /// Builds a tour from an order already known to be a canonical
    /// permutation. Checked in debug builds only.
    pub(crate) fn from_canonical_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(check_permutation(&order).is_ok() && order.first() == Some(&0));
        Self(order)
    }

    fn canonical(mut order: Vec<usize>) -> Self {
        if let Some(pos) = order.iter().position(|&c| c == 0) {
            order.rotate_left(pos);
        }
        Self(order)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Same cycle traversed the other way, still starting at city 0.
    pub fn reversed(&self) -> Self {
        let mut order = self.0.clone();
        if order.len() > 1 {
            order[1..].reverse();
        }
        Self(order)
    }

    /// Closed-loop edges `(t[i], t[i+1 mod n])`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).map(move |i| (self.0[i], self.0[(i + 1) % n]))
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = crate::Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Tour::new(order)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.0
    }
}

impl AsRef<[usize]> for Tour {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

/// Exact permutation check of `0..order.len()`.
pub fn check_permutation(order: &[usize]) -> Result<()> {
    let n = order.len();
    if n == 0 {
        return invalid("empty tour");
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n {
            return invalid(format!("city {c} out of range for {n} cities"));
        }
        if std::mem::replace(&mut seen[c], true) {
            return invalid(format!("city {c} visited twice"));
        }
    }
    Ok(())
}

/// Every distinct closed tour on `n` cities exactly once: start at 0 and
/// fix the direction by requiring `t[1] < t[n-1]`. There are `(n-1)!/2`
/// of them for `n >= 3`.
pub fn all_canonical_tours(n: usize) -> Vec<Tour> {
    match n {
        0 => return Vec::new(),
        1 | 2 => return vec![Tour::identity(n)],
        _ => {}
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    permute(&mut rest, 0, &mut |p| {
        if p[0] < p[p.len() - 1] {
            let mut order = Vec::with_capacity(n);
            order.push(0);
            order.extend_from_slice(p);
            out.push(Tour(order));
        }
    });
    out
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
