//! Independent reference computations and random generators shared by the
//! integration tests.

#![allow(dead_code)]

use clamped_opinion::{ModelParams, OpinionProfile, Rational};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(lo, hi)` per agent by scanning every pair.
pub fn naive_windows(values: &[f64], radius: f64) -> Vec<(usize, usize)> {
    (0..values.len())
        .map(|k| {
            let members: Vec<usize> = (0..values.len())
                .filter(|&l| (values[l] - values[k]).abs() <= radius)
                .collect();
            (members[0], *members.last().unwrap())
        })
        .collect()
}

/// `h / I(k) * sum_{l in J(k)} v_l`, summing members directly.
pub fn naive_increments(values: &[Rational], eps: &Rational, h: &Rational) -> Vec<Rational> {
    values
        .iter()
        .map(|vk| {
            let members: Vec<&Rational> = values.iter().filter(|vl| (*vl - vk).abs() <= *eps).collect();
            let count = Rational::from_integer(members.len().into());
            let sum = members.into_iter().fold(Rational::zero(), |a, b| a + b);
            h * sum / count
        })
        .collect()
}

/// Naive operator on raw (unsorted) exact opinions.
pub fn naive_phi(values: &[Rational], eps: &Rational, h: &Rational) -> Vec<Rational> {
    let one = Rational::one();
    values
        .iter()
        .zip(naive_increments(values, eps, h))
        .map(|(v, d)| {
            let w = v + d;
            if w < -one.clone() {
                -one.clone()
            } else if w > one {
                one.clone()
            } else {
                w
            }
        })
        .collect()
}

/// 3x3 determinant over the rationals.
pub fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    let t = |a: &Rational, b: &Rational, c: &Rational| a * b * c;
    t(&m[0][0], &m[1][1], &m[2][2]) + t(&m[0][1], &m[1][2], &m[2][0]) + t(&m[0][2], &m[1][0], &m[2][1])
        - t(&m[0][2], &m[1][1], &m[2][0])
        - t(&m[0][0], &m[1][2], &m[2][1])
        - t(&m[0][1], &m[1][0], &m[2][2])
}

pub fn uniform_values(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Opinions on a coarse grid with many ties and exact boundary distances.
pub fn grid_values(rng: &mut impl Rng, n: usize, steps: i32) -> Vec<f64> {
    (0..n)
        .map(|_| rng.gen_range(-steps..=steps) as f64 / steps as f64)
        .collect()
}

pub fn random_params(rng: &mut impl Rng, eps_max: f64) -> ModelParams {
    let h = rng.gen_range(0.01..0.99);
    let eps = rng.gen_range(0.01..eps_max);
    ModelParams::new(h, eps).unwrap()
}

pub fn random_profile(rng: &mut impl Rng, n_max: usize) -> OpinionProfile {
    let n = rng.gen_range(1..=n_max);
    let values = if rng.gen_bool(0.25) {
        grid_values(rng, n, 20)
    } else {
        uniform_values(rng, n)
    };
    OpinionProfile::from_raw(values).unwrap()
}

pub fn is_nondecreasing<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] <= w[1])
}
