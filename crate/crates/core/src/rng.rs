//! Counter-keyed random streams.
//!
//! Every random draw in the crate comes from a generator keyed by a
//! `(seed, index)` pair, so sample `i` of a batch is the same no matter which
//! thread produces it or in which order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha12Rng;

/// Generator for stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed, used when a keyed computation needs its own keyed
/// sub-streams (e.g. sample `i` running see-saw restarts).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut rng = stream(seed ^ 0x9e37_79b9_7f4a_7c15, index);
    rng.random()
}

/// Standard complex Gaussian, E|z|^2 = 1.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// Uniformly random unit vector in C^len (Haar measure on the sphere).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    loop {
        let mut v = gaussian_vector(rng, len);
        let n = crate::tensor::norm(&v);
        if n > 1e-300 {
            v.iter_mut().for_each(|z| *z /= n);
            return v;
        }
    }
}

/// Uniformly random real unit vector in R^len.
pub fn real_unit_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
