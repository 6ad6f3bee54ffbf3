#![allow(dead_code)]

use std::f64::consts::PI;

use phasekick::noise::{DiscreteDistribution, MarkovKickKernel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` distinct atoms drawn from `pool` with random normalized weights.
pub fn random_distribution(
    rng: &mut ChaCha8Rng,
    pool: &[f64],
    count: usize,
) -> DiscreteDistribution {
    let mut angles = pool.to_vec();
    angles.shuffle(rng);
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    DiscreteDistribution::new(
        angles
            .into_iter()
            .zip(raw)
            .map(|(a, w)| (a, w / total))
            .collect(),
    )
    .expect("valid random distribution")
}

/// Kernel with up to `max_branches` branches and up to `max_atoms` atoms
/// per emission. Conditions and atoms share a small angle pool so that
/// emitted angles regularly land in condition sets. Returns the kernel and
/// an initial angle (usually from the pool, sometimes off it).
pub fn random_kernel(
    rng: &mut ChaCha8Rng,
    max_branches: usize,
    max_atoms: usize,
) -> (MarkovKickKernel, f64) {
    let pool_size = rng.random_range(max_atoms.max(3)..=8);
    let pool: Vec<f64> = (0..pool_size).map(|_| rng.random_range(-PI..PI)).collect();
    let mut conditions = pool.clone();
    conditions.shuffle(rng);
    let n_branches = rng.random_range(0..=max_branches);
    let mut branches = Vec::new();
    for _ in 0..n_branches {
        let take = rng.random_range(1..=2).min(conditions.len());
        if take == 0 {
            break;
        }
        let set: Vec<f64> = conditions.drain(..take).collect();
        let atoms = rng.random_range(1..=max_atoms);
        branches.push((set, random_distribution(rng, &pool, atoms)));
    }
    let atoms = rng.random_range(1..=max_atoms);
    let default = random_distribution(rng, &pool, atoms);
    let kernel = MarkovKickKernel::new(branches, default).expect("valid random kernel");
    let initial = if rng.random_bool(0.8) {
        pool[rng.random_range(0..pool.len())]
    } else {
        rng.random_range(-PI..PI)
    };
    (kernel, initial)
}

/// Composite Simpson rule on `[lo, hi]` with `intervals` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2));
    let h = (hi - lo) / intervals as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// `E[e^{iθ}]` of `N(0, 2λ)` by quadrature (the imaginary part vanishes by
/// symmetry, so only the cosine moment is integrated).
pub fn gaussian_characteristic_by_quadrature(lambda: f64) -> f64 {
    let var = 2.0 * lambda;
    let sd = var.sqrt();
    let density = |t: f64| (-t * t / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    simpson(|t| t.cos() * density(t), -14.0 * sd, 14.0 * sd, 20_000)
}
