//! Heterogeneous domain adaptation: transport source labels to target samples
//! through the COOT sample coupling.

use alloc::vec::Vec;

use crate::coot::{
    collect_best, restart_init, solve_coot_adjusted, CootProblem, CootSolution, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::error::{dim_err, domain_err};
use crate::restart::RestartRunner;
use crate::{Error, Histogram, Loss, Matrix, Result};

/// One-hot class labels; unlabeled rows are all zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    labels: Vec<Option<usize>>,
    classes: usize,
}

impl LabelMatrix {
    pub fn new(labels: Vec<Option<usize>>, classes: usize) -> Result<Self> {
        if classes == 0 {
            return Err(dim_err!("label matrix needs at least one class"));
        }
        if let Some(bad) = labels.iter().flatten().find(|&&c| c >= classes) {
            return Err(dim_err!("class {bad} out of range for {classes} classes"));
        }
        Ok(Self { labels, classes })
    }

    /// Fully labeled, with as many classes as the largest label needs.
    pub fn from_classes(labels: &[usize]) -> Result<Self> {
        let classes = labels.iter().max().map_or(1, |m| m + 1);
        Self::new(labels.iter().map(|&c| Some(c)).collect(), classes)
    }

    /// Rows must be one-hot or all zero.
    pub fn from_onehot(onehot: &Matrix) -> Result<Self> {
        let mut labels = Vec::with_capacity(onehot.rows());
        for (i, row) in onehot.iter_rows().enumerate() {
            if row.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(domain_err!("row {i} has entries outside {{0, 1}}"));
            }
            let mut hot = row.iter().enumerate().filter(|(_, &v)| v == 1.0).map(|(k, _)| k);
            let first = hot.next();
            if hot.next().is_some() {
                return Err(domain_err!("row {i} has more than one class"));
            }
            labels.push(first);
        }
        Self::new(labels, onehot.cols())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn onehot(&self) -> Matrix {
        Matrix::from_fn(self.labels.len(), self.classes, |i, k| {
            if self.labels[i] == Some(k) {
                1.0
            } else {
                0.0
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    /// `n_t × K` class scores `π^sᵀ Y_s`.
    pub scores: Matrix,
    /// Highest-scoring class per target (lowest index on ties), `None` when the
    /// target received no labeled mass.
    pub labels: Vec<Option<usize>>,
}

pub fn propagate_labels(pi_s: &Matrix, ys: &LabelMatrix) -> Result<Propagation> {
    if pi_s.rows() != ys.len() {
        return Err(dim_err!(
            "coupling has {} source rows, labels have {}",
            pi_s.rows(),
            ys.len()
        ));
    }
    let scores = pi_s.t_matmul(&ys.onehot())?;
    let labels = scores
        .iter_rows()
        .map(|row| row.iter().any(|&s| s > 0.0).then(|| crate::measure::argmax(row)))
        .collect();
    Ok(Propagation { scores, labels })
}

/// Adds `penalty` to `cost[i][j]` wherever source `i` and target `j` are both
/// labeled with different classes.
pub fn mask_semisupervised_cost(cost: &Matrix, ys: &LabelMatrix, yt: &LabelMatrix, penalty: f64) -> Result<Matrix> {
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(domain_err!("penalty must be positive and finite, got {penalty}"));
    }
    if cost.shape() != (ys.len(), yt.len()) {
        return Err(dim_err!(
            "cost is {}x{} but there are {} source and {} target labels",
            cost.rows(),
            cost.cols(),
            ys.len(),
            yt.len()
        ));
    }
    let mut out = cost.clone();
    for (i, s) in ys.labels().iter().enumerate() {
        let Some(s) = s else { continue };
        for (j, t) in yt.labels().iter().enumerate() {
            if matches!(t, Some(t) if t != s) {
                out[(i, j)] += penalty;
            }
        }
    }
    Ok(out)
}

/// `10³ ×` the largest entry of the unmasked cost, or 1 when that is zero.
pub fn auto_penalty(cost: &Matrix) -> f64 {
    let m = cost.max_abs();
    if m > 0.0 {
        1e3 * m
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// Recomputed from the unmasked cost at every BCD iteration.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdaConfig {
    pub loss: Loss,
    pub eps_samples: f64,
    pub eps_features: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub penalty: Penalty,
}

impl HdaConfig {
    /// Exact couplings, squared loss, automatic penalty.
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            loss: Loss::SquaredEuclidean,
            eps_samples: 0.0,
            eps_features: 0.0,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            restarts,
            seed,
            penalty: Penalty::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdaResult {
    pub solution: CootSolution,
    pub propagation: Propagation,
    pub best_index: usize,
    pub costs: Vec<f64>,
}

/// Multi-start COOT between source and target samples (uniform weights), with the
/// semi-supervised mask applied to the sample cost when target labels are given,
/// followed by label propagation from the cheapest restart.
pub fn hda<R: RestartRunner>(
    xs: &Matrix,
    xt: &Matrix,
    ys: &LabelMatrix,
    yt_partial: Option<&LabelMatrix>,
    config: &HdaConfig,
    runner: &R,
) -> Result<HdaResult> {
    if ys.len() != xs.rows() {
        return Err(dim_err!("{} source labels for {} source rows", ys.len(), xs.rows()));
    }
    if let Some(yt) = yt_partial {
        if yt.len() != xt.rows() {
            return Err(dim_err!("{} target labels for {} target rows", yt.len(), xt.rows()));
        }
    }
    if let Penalty::Fixed(p) = config.penalty {
        if !(p > 0.0 && p.is_finite()) {
            return Err(domain_err!("penalty must be positive and finite, got {p}"));
        }
    }
    if config.restarts == 0 {
        return Err(Error::Config("at least one restart is required".into()));
    }
    let problem = CootProblem {
        x: xs.clone(),
        x2: xt.clone(),
        w: Histogram::uniform(xs.rows())?,
        w2: Histogram::uniform(xt.rows())?,
        v: Histogram::uniform(xs.cols())?,
        v2: Histogram::uniform(xt.cols())?,
        loss: config.loss,
        eps_samples: config.eps_samples,
        eps_features: config.eps_features,
        max_iter: config.max_iter,
        tol: config.tol,
    };
    problem.validate()?;

    let mask = |cost: &Matrix| -> Result<Matrix> {
        match yt_partial {
            None => Ok(cost.clone()),
            Some(yt) => {
                let penalty = match config.penalty {
                    Penalty::Auto => auto_penalty(cost),
                    Penalty::Fixed(p) => p,
                };
                mask_semisupervised_cost(cost, ys, yt, penalty)
            }
        }
    };
    let results = runner.run(config.restarts, |r| {
        let (pi_s, pi_v) = restart_init(&problem, config.seed, r)?;
        solve_coot_adjusted(&problem, pi_s, pi_v, &mask)
    });
    let best = collect_best(results, |s| s.cost)?;
    let propagation = propagate_labels(best.best.pi_s.plan(), ys)?;
    Ok(HdaResult {
        solution: best.best,
        propagation,
        best_index: best.best_index,
        costs: best.costs,
    })
}
