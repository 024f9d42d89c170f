/// SplitMix64 finalizer, used to derive independent RNG streams from a
/// base seed and a few integers.
pub(crate) fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut x = seed;
    for &p in parts {
        x = splitmix(x ^ splitmix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    x
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Cardinality-weighted percentile: the smallest value whose cumulative
/// weight reaches `p` percent of the total. `items` must be sorted by value.
pub(crate) fn weighted_percentile(items: &[(f64, usize)], p: f64) -> f64 {
    let total: usize = items.iter().map(|(_, w)| w).sum();
    let target = (p / 100.0) * total as f64;
    let mut acc = 0usize;
    for &(v, w) in items {
        acc += w;
        if acc as f64 >= target {
            return v;
        }
    }
    items.last().map_or(0.0, |(v, _)| *v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_is_deterministic_and_spreads() {
        assert_eq!(mix_seed(1, &[2, 3]), mix_seed(1, &[2, 3]));
        assert_ne!(mix_seed(1, &[2, 3]), mix_seed(1, &[3, 2]));
        assert_ne!(mix_seed(1, &[0, 1]), mix_seed(1, &[1, 0]));
    }

    #[test]
    fn percentiles_weight_by_count() {
        let items = [(1.0, 1), (2.0, 8), (3.0, 1)];
        assert_eq!(weighted_percentile(&items, 0.0), 1.0);
        assert_eq!(weighted_percentile(&items, 5.0), 1.0);
        assert_eq!(weighted_percentile(&items, 50.0), 2.0);
        assert_eq!(weighted_percentile(&items, 95.0), 3.0);
        assert_eq!(weighted_percentile(&items, 100.0), 3.0);
    }
}
