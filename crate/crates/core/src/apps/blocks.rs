//! Gaussian latent block model used to simulate co-clustering benchmarks.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Matrix, Result};

/// Mean spacing of well-separated blocks.
pub const WELL_SEPARATED: f64 = 4.0;
/// Mean spacing of ill-separated blocks.
pub const ILL_SEPARATED: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    D1,
    D2,
    D3,
    D4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockConfig {
    pub n: usize,
    pub d: usize,
    pub g: usize,
    pub m: usize,
    pub row_proportions: Vec<f64>,
    pub col_proportions: Vec<f64>,
    /// Spacing between distinct block means.
    pub separation: f64,
    /// Standard deviation of the within-block noise.
    pub noise: f64,
}

/// `p_a ∝ a + 1`, e.g. `[1/6, 1/3, 1/2]` for three clusters.
pub fn unequal_proportions(k: usize) -> Vec<f64> {
    let total = (k * (k + 1) / 2) as f64;
    (0..k).map(|a| (a + 1) as f64 / total).collect()
}

fn equal_proportions(k: usize) -> Vec<f64> {
    alloc::vec![1.0 / k as f64; k]
}

impl BlockConfig {
    pub fn preset(preset: Preset) -> Self {
        let (n, d, g, m, separation, unequal) = match preset {
            Preset::D1 => (600, 300, 3, 3, WELL_SEPARATED, false),
            Preset::D2 => (600, 300, 3, 3, WELL_SEPARATED, true),
            Preset::D3 => (300, 200, 2, 4, ILL_SEPARATED, false),
            Preset::D4 => (300, 300, 5, 4, ILL_SEPARATED, true),
        };
        let props = if unequal {
            unequal_proportions
        } else {
            equal_proportions
        };
        Self {
            n,
            d,
            g,
            m,
            row_proportions: props(g),
            col_proportions: props(m),
            separation,
            noise: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.g == 0 || self.m == 0 || self.g > self.n || self.m > self.d {
            return Err(Error::Config(alloc::format!(
                "need 1 <= g <= n and 1 <= m <= d, got g={} n={} m={} d={}",
                self.g,
                self.n,
                self.m,
                self.d
            )));
        }
        for (name, p, k) in [
            ("row", &self.row_proportions, self.g),
            ("column", &self.col_proportions, self.m),
        ] {
            if p.len() != k {
                return Err(Error::Config(alloc::format!(
                    "{name} proportions have {} entries, expected {k}",
                    p.len()
                )));
            }
            if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::Config(alloc::format!("{name} proportions must be positive")));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Config(alloc::format!(
                    "{name} proportions sum to {total}, not 1"
                )));
            }
        }
        if !(self.separation.is_finite() && self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::Config("separation and noise must be finite, noise >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockData {
    pub x: Matrix,
    pub true_rows: Vec<usize>,
    pub true_cols: Vec<usize>,
    /// `g × m` block means.
    pub means: Matrix,
}

/// Cluster sizes by largest remainder, then topped up so no cluster is empty.
fn cluster_sizes(total: usize, proportions: &[f64]) -> Vec<usize> {
    let k = proportions.len();
    let raw: Vec<f64> = proportions.iter().map(|p| p * total as f64).collect();
    let mut sizes: Vec<usize> = raw.iter().map(|r| *r as usize).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        (raw[b] - sizes[b] as f64)
            .total_cmp(&(raw[a] - sizes[a] as f64))
            .then(a.cmp(&b))
    });
    let assigned: usize = sizes.iter().sum();
    for &a in order.iter().take(total.saturating_sub(assigned)) {
        sizes[a] += 1;
    }
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let largest = (0..k)
            .max_by_key(|&a| (sizes[a], core::cmp::Reverse(a)))
            .expect("k >= 1");
        sizes[largest] -= 1;
        sizes[empty] += 1;
    }
    sizes
}

fn shuffled_labels(total: usize, proportions: &[f64], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut labels: Vec<usize> = cluster_sizes(total, proportions)
        .into_iter()
        .enumerate()
        .flat_map(|(a, s)| core::iter::repeat_n(a, s))
        .collect();
    labels.shuffle(rng);
    labels
}

/// `X_ik ~ Normal(μ[z_i][c_k], noise²)`. The `g·m` block means are a seeded
/// permutation of `{0, separation, 2·separation, …}`, so every pair of blocks
/// differs by at least `separation`.
pub fn generate_blocks(config: &BlockConfig, seed: u64) -> Result<BlockData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<usize> = (0..config.g * config.m).collect();
    levels.shuffle(&mut rng);
    let means = Matrix::from_fn(config.g, config.m, |a, b| {
        config.separation * levels[a * config.m + b] as f64
    });
    let true_rows = shuffled_labels(config.n, &config.row_proportions, &mut rng);
    let true_cols = shuffled_labels(config.d, &config.col_proportions, &mut rng);
    let x = Matrix::from_fn(config.n, config.d, |i, k| {
        let z: f64 = StandardNormal.sample(&mut rng);
        means[(true_rows[i], true_cols[k])] + config.noise * z
    });
    Ok(BlockData {
        x,
        true_rows,
        true_cols,
        means,
    })
}
