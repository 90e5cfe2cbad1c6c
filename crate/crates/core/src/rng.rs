//! Counter-style random streams.
//!
//! Every random draw in the crate comes from a stream addressed by
//! `(seed, label, indices…)`. The stream is a ChaCha generator keyed by the
//! seed whose 64-bit stream id is a hash of the label and indices, so a given
//! trial sees the same numbers regardless of evaluation order or worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::C64;

pub type StreamRng = ChaCha12Rng;

/// Open the stream for `(seed, label, indices)`.
pub fn stream(seed: u64, label: &str, indices: &[u64]) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    for i in indices {
        hasher.update(i.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut id = [0u8; 8];
    id.copy_from_slice(&digest[..8]);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(u64::from_le_bytes(id));
    rng
}

/// Standard complex normal: `E|a|² = 1`, density `π⁻¹ e^{-|a|²}`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform on `(0, 1]`.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Uniformly distributed unit vector in `C^d`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_numbers() {
        let mut a = stream(7, "trial", &[10, 3]);
        let mut b = stream(7, "trial", &[10, 3]);
        for _ in 0..16 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    #[test]
    fn different_indices_differ() {
        let mut a = stream(7, "trial", &[10, 3]);
        let mut b = stream(7, "trial", &[10, 4]);
        let mut c = stream(7, "other", &[10, 3]);
        let x = a.random::<u64>();
        assert_ne!(x, b.random::<u64>());
        assert_ne!(x, c.random::<u64>());
    }

    #[test]
    fn complex_normal_unit_second_moment() {
        let mut rng = stream(1, "cn", &[]);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| complex_normal(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((m - 1.0).abs() < 0.01, "{m}");
    }

    #[test]
    fn unit_vectors_have_norm_one() {
        let mut rng = stream(2, "uv", &[]);
        for d in [1, 3, 17] {
            let v = unit_vector(&mut rng, d);
            let n: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }
}
