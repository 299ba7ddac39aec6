#![allow(dead_code)]

use std::f64::consts::TAU;

use cocircular::{AngleConfiguration, MassVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_masses(rng: &mut impl Rng, n: usize) -> MassVector {
    MassVector::new((0..n).map(|_| rng.gen_range(0.5..3.0)).collect()).unwrap()
}

/// Sorted angles in `(0, 2π]` ending at `2π`, adjacent gaps at least `min_gap`.
pub fn random_config(rng: &mut impl Rng, n: usize, min_gap: f64) -> AngleConfiguration {
    loop {
        let mut theta: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..TAU)).collect();
        theta.sort_by(f64::total_cmp);
        theta.push(TAU);
        let mut prev = 0.0;
        if theta.iter().all(|&t| {
            let ok = t - prev >= min_gap;
            prev = t;
            ok
        }) {
            return AngleConfiguration::new(theta).unwrap();
        }
    }
}

/// Random `y` with the same total mass as `m`, entries kept positive.
pub fn same_total(rng: &mut impl Rng, m: &MassVector) -> MassVector {
    let n = m.len();
    let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.4..0.4)).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    d.iter_mut().for_each(|x| *x -= mean);
    MassVector::new(m.as_slice().iter().zip(&d).map(|(a, b)| a + b).collect()).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
