//! Seeded multi-start support shared by the non-convex solvers.
//!
//! Restart `r` of a run seeded with `s` draws from ChaCha8 stream `r` of seed `s`,
//! so every restart is reproducible on its own and the selected result does not
//! depend on how restarts are scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ot::{sinkhorn, SINKHORN_MAX_ITER};
use crate::{Coupling, Histogram, Matrix, Result};

/// Log-scale spread of the random positive kernel behind [`random_coupling`].
const INIT_SPREAD: f64 = 8.0;

/// Runs independent restart jobs. Implementations may run them concurrently but
/// must return results in index order.
pub trait RestartRunner {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs restarts one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl RestartRunner for Sequential {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(job).collect()
    }
}

pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Index of the smallest cost; ties go to the lowest index.
pub fn select_best(costs: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &c) in costs.iter().enumerate() {
        match best {
            Some(b) if c.partial_cmp(&costs[b]) != Some(core::cmp::Ordering::Less) => {}
            _ => best = Some(i),
        }
    }
    best
}

/// A seeded random point of `Π(w, w')`: a positive random kernel scaled onto the
/// marginals with Sinkhorn.
pub fn random_coupling<R: Rng>(w: &Histogram, w2: &Histogram, rng: &mut R) -> Result<Coupling> {
    let kernel = Matrix::from_fn(w.len(), w2.len(), |_, _| -INIT_SPREAD * rng.random::<f64>());
    let r = sinkhorn(w, w2, &kernel, 1.0, SINKHORN_MAX_ITER, 1e-12)?;
    Ok(r.coupling)
}

/// `(1 − t)·P + t·w w'ᵀ` for a feasible `P`, which stays feasible.
pub fn blend_with_product(p: &Coupling, t: f64) -> Coupling {
    let w = p.row_marginal();
    let w2 = p.col_marginal();
    let plan = Matrix::from_fn(w.len(), w2.len(), |i, j| {
        (1.0 - t) * p.plan()[(i, j)] + t * w[i] * w2[j]
    });
    Coupling::from_solver(plan, w, w2)
}
