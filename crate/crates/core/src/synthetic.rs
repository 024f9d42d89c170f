//! Seeded synthetic datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::dataset::{Sequences, Vectors};
use crate::{Error, Result};

/// Standard deviation of the noise added to manifold points.
pub const MANIFOLD_NOISE: f64 = 0.001;

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroCardinality);
    }
    if d == 0 {
        return Err(Error::Input("dimensionality must be positive".into()));
    }
    Ok(())
}

/// `n` points with i.i.d. coordinates uniform in `[0, 1)`.
pub fn uniform_hypercube(n: usize, d: usize, seed: u64) -> Result<Vectors> {
    check_shape(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * d).map(|_| rng.random::<f32>()).collect();
    Vectors::new(d, data)
}

/// `n` points on a random `intrinsic`-dimensional affine patch in `d`
/// dimensions, with isotropic Gaussian noise of standard deviation
/// [`MANIFOLD_NOISE`].
///
/// The patch is `o + sum_i a_i b_i` for a random offset `o` in the unit
/// cube, a random orthonormal basis `b`, and coefficients `a_i` uniform in
/// `[0, 1)`.
pub fn manifold(n: usize, d: usize, intrinsic: usize, seed: u64) -> Result<Vectors> {
    check_shape(n, d)?;
    if intrinsic == 0 || intrinsic > d {
        return Err(Error::Input(format!("intrinsic dimension must be in 1..={d}, got {intrinsic}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: Vec<f64> = (0..d).map(|_| rng.random()).collect();
    let basis = orthonormal_basis(intrinsic, d, &mut rng);
    let noise = Normal::new(0.0, MANIFOLD_NOISE).expect("valid normal");

    let mut data = Vec::with_capacity(n * d);
    let mut point = vec![0.0_f64; d];
    for _ in 0..n {
        point.copy_from_slice(&offset);
        for b in &basis {
            let a: f64 = rng.random();
            for (p, v) in point.iter_mut().zip(b) {
                *p += a * v;
            }
        }
        data.extend(point.iter().map(|&p| (p + noise.sample(&mut rng)) as f32));
    }
    Vectors::new(d, data)
}

/// Gram-Schmidt on Gaussian vectors.
fn orthonormal_basis(k: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

/// `n` sequences of length `len` with symbols drawn uniformly from
/// `alphabet`.
pub fn random_sequences(n: usize, len: usize, alphabet: &[u8], seed: u64) -> Result<Sequences> {
    if n == 0 {
        return Err(Error::ZeroCardinality);
    }
    if alphabet.is_empty() {
        return Err(Error::Input("alphabet is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seqs: Vec<Vec<u8>> =
        (0..n).map(|_| (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()).collect();
    Ok(Sequences::from_seqs(&seqs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PointStore;

    #[test]
    fn hypercube_is_in_range_and_seeded() {
        let v = uniform_hypercube(100, 7, 3).unwrap();
        assert_eq!((v.len(), v.dim()), (100, 7));
        assert!(v.as_slice().iter().all(|&x| (0.0..1.0).contains(&x)));
        assert_eq!(uniform_hypercube(100, 7, 3).unwrap(), v);
        assert_ne!(uniform_hypercube(100, 7, 4).unwrap(), v);
        assert!(uniform_hypercube(0, 7, 3).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = orthonormal_basis(5, 12, &mut rng);
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9);
            }
        }
    }

    /// Residuals after projecting onto the patch should look like the noise.
    #[test]
    fn manifold_points_lie_near_a_flat_patch() {
        let (n, d, k) = (400, 20, 3);
        let v = manifold(n, d, k, 11).unwrap();
        assert_eq!(v, manifold(n, d, k, 11).unwrap());
        // Recover the patch from the generator's own stream.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let offset: Vec<f64> = (0..d).map(|_| rng.random()).collect();
        let basis = orthonormal_basis(k, d, &mut rng);
        let mut max_residual = 0.0_f64;
        for row in v.rows() {
            let centered: Vec<f64> = row.iter().zip(&offset).map(|(&x, o)| x as f64 - o).collect();
            let mut resid = centered.clone();
            for b in &basis {
                let dot: f64 = centered.iter().zip(b).map(|(x, y)| x * y).sum();
                assert!((-0.01..1.01).contains(&dot));
                for (r, y) in resid.iter_mut().zip(b) {
                    *r -= dot * y;
                }
            }
            max_residual = max_residual.max(resid.iter().map(|r| r * r).sum::<f64>().sqrt());
        }
        // sqrt(d) * sigma is about 0.0045; allow a wide margin.
        assert!(max_residual < 0.02, "{max_residual}");
    }

    #[test]
    fn manifold_rejects_bad_dimensions() {
        assert!(manifold(10, 4, 5, 0).is_err());
        assert!(manifold(10, 4, 0, 0).is_err());
        assert!(manifold(10, 4, 4, 0).is_ok());
    }

    #[test]
    fn sequences_use_the_alphabet() {
        let s = random_sequences(50, 32, b"ACGT", 2).unwrap();
        assert_eq!(s.len(), 50);
        assert_eq!(s.uniform_length(), Some(32));
        assert!(s.iter().all(|q| q.iter().all(|c| b"ACGT".contains(c))));
        assert!(random_sequences(5, 3, b"", 0).is_err());
    }
}
