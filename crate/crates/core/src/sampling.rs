//! Seeded random generators shared by the experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for item `index` under a base seed (splitmix64 mixing).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_rng(seed: u64, index: u64) -> SeededRng {
    rng(child_seed(seed, index))
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Flat Dirichlet(1, ..., 1) weights.
pub fn dirichlet_flat<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

pub fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `k` distinct indices from `0..n`, sorted.
pub fn subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, n, k.min(n)).into_vec();
    idx.sort_unstable();
    idx
}

/// Point of the unit l_p ball of R^n: generalized-Gaussian direction on the
/// sphere with radius `U^{1/n}`.
pub fn lp_ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = rng.sample(rand_distr::Gamma::new(1.0 / p, 1.0).expect("valid gamma"));
            random_sign(rng) * e.powf(1.0 / p)
        })
        .collect();
    let norm = lp_norm(&x, p);
    let radius = rng.gen::<f64>().powf(1.0 / n as f64);
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v *= radius / norm);
    }
    x
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}
