//! Distance functions.
//!
//! Every search algorithm in this crate is generic over [`Metric`]. Exactness
//! is only guaranteed for functions that satisfy the triangle inequality,
//! which is what [`Metric::is_metric`] advertises.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::{Error, Result};

/// A symmetric, non-negative dissimilarity over points of type `T`.
pub trait Metric<T: ?Sized>: Send + Sync {
    /// The name used on the command line and in tree file headers.
    fn name(&self) -> &'static str;

    /// Whether the triangle inequality is guaranteed.
    fn is_metric(&self) -> bool;

    fn distance(&self, a: &T, b: &T) -> f64;

    /// Whether the set of points nearer to one pole than another is bounded
    /// by a Euclidean hyperplane. This lets rho-NN search use the exact
    /// point-to-bisector distance when deciding which children to visit.
    fn has_euclidean_bisectors(&self) -> bool {
        false
    }

    /// A strictly increasing map under which distances obey the triangle
    /// inequality. Searches compare bounds in this space and report the
    /// untransformed distances. The identity for true metrics.
    #[inline]
    fn bound(&self, d: f64) -> f64 {
        d
    }
}

/// L2 distance over real vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

/// `1 - cos(a, b)`. Not a metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cosine;

/// Number of positions at which two equal-length sequences differ.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hamming;

/// Unit-cost edit distance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Levenshtein;

/// Unconstrained dynamic time warping with absolute-difference steps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dtw;

impl Metric<[f32]> for Euclidean {
    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn is_metric(&self) -> bool {
        true
    }

    #[inline]
    fn distance(&self, a: &[f32], b: &[f32]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        euclidean_unchecked(a, b)
    }

    fn has_euclidean_bisectors(&self) -> bool {
        true
    }
}

impl Metric<[f32]> for Cosine {
    fn name(&self) -> &'static str {
        "cosine"
    }

    fn is_metric(&self) -> bool {
        false
    }

    #[inline]
    fn distance(&self, a: &[f32], b: &[f32]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        cosine_unchecked(a, b)
    }

    /// `sqrt(2 d)` is the chord length between the normalized vectors.
    #[inline]
    fn bound(&self, d: f64) -> f64 {
        (2.0 * d).sqrt()
    }
}

impl Metric<[u8]> for Hamming {
    fn name(&self) -> &'static str {
        "hamming"
    }

    fn is_metric(&self) -> bool {
        true
    }

    #[inline]
    fn distance(&self, a: &[u8], b: &[u8]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        hamming_unchecked(a, b) as f64
    }
}

impl Metric<[u8]> for Levenshtein {
    fn name(&self) -> &'static str {
        "levenshtein"
    }

    fn is_metric(&self) -> bool {
        true
    }

    #[inline]
    fn distance(&self, a: &[u8], b: &[u8]) -> f64 {
        levenshtein(a, b) as f64
    }
}

impl Metric<[f32]> for Dtw {
    fn name(&self) -> &'static str {
        "dtw"
    }

    // Flagged as a metric for search purposes; unconstrained DTW can break
    // the triangle inequality, so the property tests only log violations.
    fn is_metric(&self) -> bool {
        true
    }

    fn distance(&self, a: &[f32], b: &[f32]) -> f64 {
        if a.is_empty() || b.is_empty() {
            return if a.len() == b.len() { 0.0 } else { f64::INFINITY };
        }
        dtw_unchecked(a, b)
    }
}

/// Which kind of point storage a distance function operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Vector,
    Sequence,
}

/// Runtime selector for the built-in distance functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Euclidean,
    Cosine,
    Hamming,
    Levenshtein,
    Dtw,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 5] = [
        DistanceKind::Euclidean,
        DistanceKind::Cosine,
        DistanceKind::Hamming,
        DistanceKind::Levenshtein,
        DistanceKind::Dtw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Cosine => "cosine",
            DistanceKind::Hamming => "hamming",
            DistanceKind::Levenshtein => "levenshtein",
            DistanceKind::Dtw => "dtw",
        }
    }

    pub fn is_metric(self) -> bool {
        !matches!(self, DistanceKind::Cosine)
    }

    pub fn point_kind(self) -> PointKind {
        match self {
            DistanceKind::Euclidean | DistanceKind::Cosine | DistanceKind::Dtw => PointKind::Vector,
            DistanceKind::Hamming | DistanceKind::Levenshtein => PointKind::Sequence,
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistanceKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::UnknownDistance(s.to_string()))
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

/// Euclidean distance, accumulated in double precision.
pub fn euclidean(a: &[f32], b: &[f32]) -> Result<f64> {
    check_lengths(a.len(), b.len())?;
    Ok(euclidean_unchecked(a, b))
}

#[inline]
fn euclidean_unchecked(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Cosine distance clamped to `[0, 2]`.
///
/// The zero vector is at distance 1 from every nonzero vector and at
/// distance 0 from itself.
pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64> {
    check_lengths(a.len(), b.len())?;
    Ok(cosine_unchecked(a, b))
}

#[inline]
fn cosine_unchecked(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut aa, mut bb) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        dot += x * y;
        aa += x * x;
        bb += y * y;
    }
    match (aa == 0.0, bb == 0.0) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        (false, false) => (1.0 - dot / (aa.sqrt() * bb.sqrt())).clamp(0.0, 2.0),
    }
}

pub fn hamming(a: &[u8], b: &[u8]) -> Result<usize> {
    check_lengths(a.len(), b.len())?;
    Ok(hamming_unchecked(a, b))
}

#[inline]
fn hamming_unchecked(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Levenshtein distance using two rows of the dynamic-programming table.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    // Keep the row over the shorter input.
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }

    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitution.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// A time-series sample for [`dtw`]. The step cost is the absolute
/// difference, or the modulus of the difference for complex samples.
pub trait DtwSample: Copy {
    fn step(self, other: Self) -> f64;
}

impl DtwSample for f32 {
    fn step(self, other: Self) -> f64 {
        (f64::from(self) - f64::from(other)).abs()
    }
}

impl DtwSample for f64 {
    fn step(self, other: Self) -> f64 {
        (self - other).abs()
    }
}

impl DtwSample for Complex<f32> {
    fn step(self, other: Self) -> f64 {
        let re = f64::from(self.re) - f64::from(other.re);
        let im = f64::from(self.im) - f64::from(other.im);
        re.hypot(im)
    }
}

impl DtwSample for Complex<f64> {
    fn step(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

/// Dynamic time warping with no warping window.
pub fn dtw<S: DtwSample>(a: &[S], b: &[S]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input("dtw requires non-empty series".into()));
    }
    Ok(dtw_unchecked(a, b))
}

fn dtw_unchecked<S: DtwSample>(a: &[S], b: &[S]) -> f64 {
    let mut prev = vec![f64::INFINITY; b.len() + 1];
    let mut curr = vec![f64::INFINITY; b.len() + 1];
    prev[0] = 0.0;
    for &x in a {
        curr[0] = f64::INFINITY;
        for (j, &y) in b.iter().enumerate() {
            let best = prev[j].min(prev[j + 1]).min(curr[j]);
            curr[j + 1] = x.step(y) + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    /// Full-table edit distance.
    fn levenshtein_table(a: &[u8], b: &[u8]) -> usize {
        let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in t.iter_mut().enumerate() {
            row[0] = i;
        }
        for (j, cell) in t[0].iter_mut().enumerate() {
            *cell = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let sub = t[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
                t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
            }
        }
        t[a.len()][b.len()]
    }

    /// Full-table DTW over f64 samples.
    fn dtw_table(a: &[f64], b: &[f64]) -> f64 {
        let (n, m) = (a.len(), b.len());
        let mut t = vec![vec![f64::INFINITY; m + 1]; n + 1];
        t[0][0] = 0.0;
        for i in 1..=n {
            for j in 1..=m {
                let best = t[i - 1][j].min(t[i][j - 1]).min(t[i - 1][j - 1]);
                t[i][j] = (a[i - 1] - b[j - 1]).abs() + best;
            }
        }
        t[n][m]
    }

    fn euclidean_reference(a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += (a[i] - b[i]).powi(2);
        }
        s.sqrt()
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        let d = euclidean(&[1.0, 1.0, 1.0], &[2.0, 3.0, 4.0]).unwrap();
        let oracle = euclidean_reference(&[1.0, 1.0, 1.0], &[2.0, 3.0, 4.0]);
        assert_eq!(d, oracle);
        assert!((d - 3.741_657_386_773_941).abs() < 1e-12);
        assert!(matches!(euclidean(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { left: 1, right: 2 })));
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        let d = cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((d - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
        let x = [0.3, -1.25, 4.0];
        let x2 = [0.6, -2.5, 8.0];
        assert!(cosine(&x, &x2).unwrap().abs() < 1e-12);
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cosine_zero_vectors() {
        assert_eq!(cosine(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn cosine_violates_triangle_inequality() {
        let (x, y, z) = ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0]);
        let xy = Cosine.distance(&x, &y);
        let xz = Cosine.distance(&x, &z);
        let zy = Cosine.distance(&z, &y);
        assert!(xy > xz + zy, "{xy} <= {xz} + {zy}");
        assert!(!Cosine.is_metric());
        let g = |d| Cosine.bound(d);
        assert!(g(xy) <= g(xz) + g(zy));
        // Chord length between unit vectors at a right angle.
        assert!((g(xy) - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(b"AAAA", b"AAAA").unwrap(), 0);
        assert_eq!(hamming(b"AAAA", b"TTTT").unwrap(), 4);
        let oracle = b"ACGT".iter().zip(b"AGGA").filter(|(a, b)| a != b).count();
        assert_eq!(hamming(b"ACGT", b"AGGA").unwrap(), oracle);
        assert_eq!(oracle, 2);
        assert!(hamming(b"AC", b"ACG").is_err());
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein(b"", b"abc"), 3);
        assert_eq!(levenshtein(b"abc", b""), 3);
        assert_eq!(levenshtein(b"genome", b"genome"), 0);
        assert_eq!(levenshtein_table(b"kitten", b"sitting"), 3);
        assert_eq!(levenshtein(b"kitten", b"sitting"), 3);
    }

    #[test]
    fn dtw_examples() {
        let x = [1.0_f32, -2.0, 0.5];
        assert_eq!(dtw(&x, &x).unwrap(), 0.0);
        assert_eq!(dtw(&[0.0_f32], &[5.0]).unwrap(), 5.0);
        assert_eq!(dtw_table(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]), 0.0);
        assert_eq!(dtw(&[1.0_f32, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]).unwrap(), 0.0);
        assert!(dtw::<f32>(&[], &[1.0]).is_err());
    }

    #[test]
    fn dtw_complex_uses_modulus() {
        let a = [Complex::new(0.0_f32, 0.0)];
        let b = [Complex::new(3.0_f32, 4.0)];
        assert_eq!(dtw(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn distance_kind_round_trips_names() {
        for kind in DistanceKind::ALL {
            assert_eq!(kind.name().parse::<DistanceKind>().unwrap(), kind);
        }
        assert!("manhattan".parse::<DistanceKind>().is_err());
        assert_eq!(Euclidean.name(), DistanceKind::Euclidean.name());
        assert_eq!(Levenshtein.name(), DistanceKind::Levenshtein.name());
    }

    fn within_ulps(lhs: f64, rhs: f64, ulps: f64) -> bool {
        lhs <= rhs + ulps * f64::EPSILON * rhs.abs().max(lhs.abs())
    }

    fn vec3() -> impl Strategy<Value = Vec<f32>> {
        prop::collection::vec(-100.0_f32..100.0, 6)
    }

    fn dna(max: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 0..max)
    }

    fn dna_fixed(len: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn vector_functions_are_symmetric(a in vec3(), b in vec3()) {
            prop_assert_eq!(Euclidean.distance(&a, &b), Euclidean.distance(&b, &a));
            prop_assert_eq!(Cosine.distance(&a, &b), Cosine.distance(&b, &a));
            prop_assert_eq!(Dtw.distance(&a, &b), Dtw.distance(&b, &a));
            prop_assert_eq!(Euclidean.distance(&a, &a), 0.0);
            prop_assert_eq!(Dtw.distance(&a, &a), 0.0);
            prop_assert!(Cosine.distance(&a, &a) < 1e-12);
            let d = Cosine.distance(&a, &b);
            prop_assert!((0.0..=2.0).contains(&d));
        }

        #[test]
        fn sequence_functions_are_symmetric(a in dna(20), b in dna(20), c in dna_fixed(12), d in dna_fixed(12)) {
            prop_assert_eq!(Levenshtein.distance(&a, &b), Levenshtein.distance(&b, &a));
            prop_assert_eq!(Levenshtein.distance(&a, &a), 0.0);
            prop_assert_eq!(Hamming.distance(&c, &d), Hamming.distance(&d, &c));
            prop_assert_eq!(Hamming.distance(&c, &c), 0.0);
            prop_assert_eq!(levenshtein(&a, &b), levenshtein_table(&a, &b));
        }

        #[test]
        fn dtw_matches_full_table(a in prop::collection::vec(-10.0_f32..10.0, 1..12),
                                  b in prop::collection::vec(-10.0_f32..10.0, 1..12)) {
            let fa: Vec<f64> = a.iter().map(|&x| f64::from(x)).collect();
            let fb: Vec<f64> = b.iter().map(|&x| f64::from(x)).collect();
            let oracle = dtw_table(&fa, &fb);
            let got = dtw(&a, &b).unwrap();
            prop_assert!((got - oracle).abs() <= 1e-9 * oracle.max(1.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn euclidean_triangle_inequality(x in vec3(), y in vec3(), z in vec3()) {
            let f = Euclidean;
            prop_assert!(within_ulps(f.distance(&x, &z), f.distance(&x, &y) + f.distance(&y, &z), 4.0));
        }

        #[test]
        fn sequence_triangle_inequality(x in dna(16), y in dna(16), z in dna(16),
                                        a in dna_fixed(10), b in dna_fixed(10), c in dna_fixed(10)) {
            let f = Levenshtein;
            prop_assert!(f.distance(&x, &z) <= f.distance(&x, &y) + f.distance(&y, &z));
            let h = Hamming;
            prop_assert!(h.distance(&a, &c) <= h.distance(&a, &b) + h.distance(&b, &c));
        }

        // The square root amplifies rounding near zero, hence the absolute
        // tolerance.
        #[test]
        fn cosine_bound_triangle_inequality(x in vec3(), y in vec3(), z in vec3()) {
            let g = |a: &[f32], b: &[f32]| Cosine.bound(Cosine.distance(a, b));
            prop_assert!(g(&x, &z) <= g(&x, &y) + g(&y, &z) + 1e-6);
        }
    }

    // DTW is flagged as a metric but may break the triangle inequality, so
    // violations are counted and reported rather than failed.
    #[test]
    fn dtw_triangle_violations_are_logged() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut series = || -> Vec<f32> {
            let len = rng.random_range(1..8);
            (0..len).map(|_| rng.random_range(-5.0..5.0)).collect()
        };
        let mut violations = 0;
        for _ in 0..10_000 {
            let (x, y, z) = (series(), series(), series());
            let (xz, xy, yz) = (Dtw.distance(&x, &z), Dtw.distance(&x, &y), Dtw.distance(&y, &z));
            if !within_ulps(xz, xy + yz, 4.0) {
                violations += 1;
            }
        }
        eprintln!("dtw triangle-inequality violations: {violations} / 10000");
    }
}
