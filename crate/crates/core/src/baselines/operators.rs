//! Permutation operators on canonical tours. Position 0 (city 0) is held
//! fixed; operators act on positions `1..n`.

use rand::Rng;

/// Order crossover (OX): copy a random slice of `a`, fill the remaining
/// positions with the missing cities in the order they appear in `b`.
pub(crate) fn order_crossover<R: Rng + ?Sized>(a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
    let n = a.len();
    if n < 4 {
        return a.to_vec();
    }
    let (mut lo, mut hi) = (rng.gen_range(1..n), rng.gen_range(1..n));
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    child[0] = 0;
    used[0] = true;
    for p in lo..=hi {
        child[p] = a[p];
        used[a[p]] = true;
    }
    // Fill after the slice, wrapping within positions 1..n, in b's cyclic order.
    let mut fill = (hi % (n - 1)) + 1;
    for step in 0..(n - 1) {
        let city = b[1 + (hi + step) % (n - 1)];
        if used[city] {
            continue;
        }
        child[fill] = city;
        used[city] = true;
        fill = (fill % (n - 1)) + 1;
    }
    child
}

/// Reverses a random segment of positions `1..n`.
pub(crate) fn inversion_mutation<R: Rng + ?Sized>(t: &mut [usize], rng: &mut R) {
    let n = t.len();
    if n < 4 {
        return;
    }
    let (mut lo, mut hi) = (rng.gen_range(1..n), rng.gen_range(1..n));
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    t[lo..=hi].reverse();
}
