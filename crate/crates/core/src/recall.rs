//! Recall against ground truth, forgiving ties at the k-th distance.

use std::collections::HashSet;

/// Tolerance, in units in the last place, when comparing a returned
/// distance with the k-th true distance.
pub const ULPS: u32 = 4;

/// Whether `a <= b` up to `ULPS` units in the last place of `b`.
pub fn le_within_ulps(a: f64, b: f64) -> bool {
    let mut bound = b;
    for _ in 0..ULPS {
        bound = bound.next_up();
    }
    a <= bound
}

/// Fraction of the `k` true neighbors recovered.
///
/// A returned item counts if its index is among the first `k` of `truth`,
/// or if its distance does not exceed the k-th true distance. Each index
/// counts once, and the count is capped at `k`. `truth` must be sorted by
/// distance and hold at least `k` items; `returned` is `(index, distance)`.
pub fn recall(returned: &[(usize, f64)], truth: &[(usize, f64)], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let truth = &truth[..k.min(truth.len())];
    let Some(&(_, kth)) = truth.last() else {
        return 0.0;
    };
    let wanted: HashSet<usize> = truth.iter().map(|&(i, _)| i).collect();
    let mut seen = HashSet::new();
    let hits =
        returned.iter().filter(|&&(i, d)| seen.insert(i) && (wanted.contains(&i) || le_within_ulps(d, kth))).count();
    hits.min(k) as f64 / k as f64
}
