#![allow(dead_code)]

use coot_core::{Histogram, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

pub fn random_histogram(rng: &mut ChaCha8Rng, n: usize) -> Histogram {
    Histogram::normalized((0..n).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap()
}

/// `Σ_ij cost_ij plan_ij` by direct summation.
pub fn transport_cost(plan: &Matrix, cost: &Matrix) -> f64 {
    let mut total = 0.0;
    for i in 0..plan.rows() {
        for j in 0..plan.cols() {
            total += plan[(i, j)] * cost[(i, j)];
        }
    }
    total
}
