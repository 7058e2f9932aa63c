use alloc::vec::Vec;

use crate::error::dim_err;
use crate::ot::exact_ot;
use crate::perm::next_permutation;
use crate::{Histogram, Matrix, Result};

/// Cluster counts up to this are matched by enumerating relabelings.
const EXHAUSTIVE_MAX: usize = 8;

/// Fraction of items misclassified under the best one-to-one relabeling of the
/// predicted clusters onto the true ones.
pub fn misclassification_rate(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(dim_err!("{} predictions for {} items", pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let k = pred.iter().chain(truth).max().map_or(0, |&m| m + 1);
    let mut confusion = alloc::vec![0usize; k * k];
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[p * k + t] += 1;
    }
    let matched = if k <= EXHAUSTIVE_MAX {
        best_matching_exhaustive(&confusion, k)
    } else {
        best_matching_ot(&confusion, k)?
    };
    Ok(1.0 - matched as f64 / pred.len() as f64)
}

fn best_matching_exhaustive(confusion: &[usize], k: usize) -> usize {
    let mut sigma: Vec<usize> = (0..k).collect();
    let mut best = 0;
    loop {
        let hits = (0..k).map(|a| confusion[a * k + sigma[a]]).sum();
        best = best.max(hits);
        if !next_permutation(&mut sigma) {
            return best;
        }
    }
}

/// Optimal assignment on the confusion matrix through exact OT with uniform
/// marginals, whose vertex solutions are scaled permutation matrices.
fn best_matching_ot(confusion: &[usize], k: usize) -> Result<usize> {
    let cost = Matrix::from_fn(k, k, |a, b| -(confusion[a * k + b] as f64));
    let u = Histogram::uniform(k)?;
    let plan = exact_ot(&u, &u, &cost)?.coupling.into_plan();
    Ok((0..k)
        .map(|a| {
            let b = crate::measure::argmax(plan.row(a));
            confusion[a * k + b]
        })
        .sum())
}

/// Co-clustering error `e_r + e_c − e_r·e_c` from the row and column misclassification rates.
pub fn cce(pred_rows: &[usize], true_rows: &[usize], pred_cols: &[usize], true_cols: &[usize]) -> Result<f64> {
    let er = misclassification_rate(pred_rows, true_rows)?;
    let ec = misclassification_rate(pred_cols, true_cols)?;
    Ok(er + ec - er * ec)
}
