//! Enlarging a vector dataset with noisy copies of its points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::{Dataset, Vectors};
use crate::metrics::euclidean;
use crate::utils::mix_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentSpec {
    /// Output cardinality as a multiple of the input cardinality.
    pub multiplier: usize,
    /// Maximum Euclidean distance of a copy from its source.
    pub epsilon: f64,
    pub seed: u64,
}

/// An augmented dataset. The first `n` points are the originals in their
/// original order; point `n + i` is a copy of `sources[i]`.
#[derive(Debug, Clone)]
pub struct Augmented {
    pub data: Dataset<Vectors>,
    pub sources: Vec<usize>,
}

impl Augmented {
    /// JSON sidecar listing the source of every synthetic point.
    pub fn sources_json(&self) -> String {
        let original = self.data.cardinality() - self.sources.len();
        serde_json::json!({ "original_cardinality": original, "sources": self.sources }).to_string()
    }
}

/// Appends `multiplier - 1` copies of every point, each displaced by a
/// vector drawn uniformly from the ball of radius `epsilon`.
pub fn augment(data: &Dataset<Vectors>, spec: AugmentSpec) -> Result<Augmented> {
    if spec.multiplier == 0 {
        return Err(Error::Input("multiplier must be at least 1".into()));
    }
    if !(spec.epsilon.is_finite() && spec.epsilon > 0.0) {
        return Err(Error::Input(format!("epsilon must be positive, got {}", spec.epsilon)));
    }
    let n = data.cardinality();
    let dim = data.store().dim();
    let mut position = vec![0; n];
    for p in 0..n {
        position[data.original_index(p)] = p;
    }
    let copies = spec.multiplier - 1;

    let mut values = Vec::with_capacity(n * spec.multiplier * dim);
    for &p in &position {
        values.extend_from_slice(data.get(p));
    }
    let synthetic: Vec<Vec<f32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let source = data.get(position[i]);
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, &[i as u64]));
            let mut out = Vec::with_capacity(copies * dim);
            for _ in 0..copies {
                out.extend(perturb(source, spec.epsilon, &mut rng));
            }
            out
        })
        .collect();
    for block in synthetic {
        values.extend(block);
    }
    let sources = (0..n).flat_map(|i| std::iter::repeat_n(i, copies)).collect();
    let name = format!("{}-x{}", data.name(), spec.multiplier);
    Ok(Augmented { data: Dataset::new(name, Vectors::new(dim, values)?)?, sources })
}

/// A point uniformly distributed in the ball of radius `epsilon` around
/// `x`. Rounding to f32 can push a sample just past the boundary; such
/// samples are redrawn.
fn perturb(x: &[f32], epsilon: f64, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let d = x.len();
    loop {
        let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let u = 1.0 - rng.random::<f64>();
        let scale = epsilon * u.powf(1.0 / d as f64) / norm;
        let y: Vec<f32> = x.iter().zip(&dir).map(|(&a, &v)| (a as f64 + v * scale) as f32).collect();
        if euclidean(x, &y).is_ok_and(|dist| dist <= epsilon) {
            return y;
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::metrics::{Euclidean, Metric};
    use crate::search::linear_knn;

    fn base(n: usize, spacing: f32) -> Dataset<Vectors> {
        let rows: Vec<[f32; 3]> = (0..n).map(|i| [i as f32 * spacing, -(i as f32) * spacing, 1.0]).collect();
        Dataset::new("base", Vectors::from_rows(&rows).unwrap()).unwrap()
    }

    #[test]
    fn multiplier_one_is_identity() {
        let d = base(5, 1.0);
        let a = augment(&d, AugmentSpec { multiplier: 1, epsilon: 0.1, seed: 0 }).unwrap();
        assert_eq!(a.data.store(), d.store());
        assert!(a.sources.is_empty());
    }

    #[test]
    fn copies_stay_within_epsilon() {
        let d = base(4, 1.0);
        let a = augment(&d, AugmentSpec { multiplier: 3, epsilon: 0.05, seed: 1 }).unwrap();
        assert_eq!(a.data.cardinality(), 12);
        for (i, &s) in a.sources.iter().enumerate() {
            let dist = Euclidean.distance(a.data.get(4 + i), d.get(s));
            assert!(dist <= 0.05, "{dist}");
        }
        for i in 0..4 {
            assert_eq!(a.data.get(i), d.get(i));
        }
        let again = augment(&d, AugmentSpec { multiplier: 3, epsilon: 0.05, seed: 1 }).unwrap();
        assert_eq!(again.data.store(), a.data.store());
        let other = augment(&d, AugmentSpec { multiplier: 3, epsilon: 0.05, seed: 2 }).unwrap();
        assert_ne!(other.data.store(), a.data.store());
    }

    #[test]
    fn knn_of_a_source_finds_its_copies() {
        let (m, eps) = (4, 0.1);
        let d = base(10, 1.0);
        let a = augment(&d, AugmentSpec { multiplier: m, epsilon: eps, seed: 3 }).unwrap();
        for i in 0..10 {
            let r = linear_knn(&a.data, &Euclidean, d.get(i), m).unwrap();
            assert_eq!(r.neighbors[0].index, i);
            assert_eq!(r.neighbors[0].distance, 0.0);
            for n in &r.neighbors[1..] {
                assert!(n.distance <= eps);
                assert_eq!(a.sources[n.index - 10], i);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let d = base(3, 1.0);
        assert!(augment(&d, AugmentSpec { multiplier: 0, epsilon: 0.1, seed: 0 }).is_err());
        assert!(augment(&d, AugmentSpec { multiplier: 2, epsilon: 0.0, seed: 0 }).is_err());
        assert!(augment(&d, AugmentSpec { multiplier: 2, epsilon: f64::NAN, seed: 0 }).is_err());
    }

    #[test]
    fn sidecar_lists_sources() {
        let d = base(2, 1.0);
        let a = augment(&d, AugmentSpec { multiplier: 3, epsilon: 0.1, seed: 0 }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&a.sources_json()).unwrap();
        assert_eq!(v["original_cardinality"], 2);
        assert_eq!(v["sources"], serde_json::json!([0, 0, 1, 1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn cardinality_and_locality(n in 1usize..30, m in prop::sample::select(vec![1usize, 2, 4, 8]), eps in 0.001_f64..2.0, seed in any::<u64>()) {
            let d = base(n, 0.7);
            let a = augment(&d, AugmentSpec { multiplier: m, epsilon: eps, seed }).unwrap();
            prop_assert_eq!(a.data.cardinality(), m * n);
            for (i, &s) in a.sources.iter().enumerate() {
                prop_assert!(Euclidean.distance(a.data.get(n + i), d.get(s)) <= eps);
            }
        }
    }
}
