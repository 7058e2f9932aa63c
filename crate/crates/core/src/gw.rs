//! Gromov–Wasserstein as COOT with tied couplings.
//!
//! For similarity matrices `C` (`n×n`) and `C'` (`n'×n'`), the GW objective is the
//! COOT objective evaluated at `(π, π)`. Tying the two BCD blocks gives the DC
//! iteration `π ← OT(w, w', L(C,C') ⊗ π)`. For squared-Euclidean `C, C'` the
//! objective is concave on the transport polytope, each step is a Frank–Wolfe step
//! whose line search always picks 1, and the objective never increases.

use alloc::vec::Vec;

use crate::coot::{bap_oracle, collect_best, MultiStart, ORACLE_MAX};
use crate::error::{dim_err, domain_err};
use crate::ot::{exact_ot, solve_ot};
use crate::perm::all_permutations;
use crate::restart::{blend_with_product, random_coupling, restart_rng, RestartRunner};
use crate::tensorcost::{contract, coot_objective, Side};
use crate::{Coupling, Error, Histogram, Loss, Matrix, Result};

/// Largest point count accepted by [`gw_coot_equivalence_check`].
pub const EQUIVALENCE_MAX: usize = 4;

/// Weight of the product coupling in the identity-biased restart.
const IDENTITY_BLEND: f64 = 0.1;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimilarityKind {
    SquaredEuclidean,
    Generic,
}

/// A symmetric square matrix of pairwise similarities (or distances).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    matrix: Matrix,
    kind: SimilarityKind,
}

impl SimilarityMatrix {
    pub fn new(matrix: Matrix, kind: SimilarityKind) -> Result<Self> {
        let (n, n2) = matrix.shape();
        if n != n2 {
            return Err(dim_err!("similarity matrix must be square, got {n}x{n2}"));
        }
        for i in 0..n {
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(domain_err!("similarity matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        if kind == SimilarityKind::SquaredEuclidean {
            if (0..n).any(|i| matrix[(i, i)] != 0.0) {
                return Err(domain_err!("squared-Euclidean matrix needs a zero diagonal"));
            }
            if matrix.as_slice().iter().any(|&x| x < 0.0) {
                return Err(domain_err!("squared-Euclidean matrix has negative entries"));
            }
        }
        Ok(Self { matrix, kind })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `C = x 1ᵀ + 1 xᵀ − 2 X Xᵀ` with `x = diag(X Xᵀ)`, i.e. `C_ij = ‖x_i − x_j‖²`.
///
/// The diagonal is set to zero and rounding below zero is clipped.
pub fn sqeuclid_matrix(points: &Matrix) -> SimilarityMatrix {
    let gram = points.matmul_t(points).expect("X Xᵀ always conforms");
    let n = points.rows();
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    SimilarityMatrix {
        matrix: c,
        kind: SimilarityKind::SquaredEuclidean,
    }
}

/// `Σ_ijkl L(C_ik, C'_jl) π_ij π_kl`, computed as the COOT objective at `(π, π)`.
pub fn gw_objective(c: &SimilarityMatrix, c2: &SimilarityMatrix, pi: &Matrix, loss: Loss) -> Result<f64> {
    coot_objective(&c.matrix, &c2.matrix, pi, pi, loss)
}

/// Cost of the DC subproblem, `L(C,C') ⊗ π`.
pub fn dc_cost(c: &SimilarityMatrix, c2: &SimilarityMatrix, pi: &Matrix, loss: Loss) -> Result<Matrix> {
    Ok(contract(&c.matrix, &c2.matrix, pi, loss, Side::SampleSide)?.matrix)
}

/// Gradient of `π ↦ gw_objective(π)`: the sum of the contractions over both slots.
/// For symmetric inputs it equals `2·L(C,C') ⊗ π`.
pub fn gw_gradient(c: &SimilarityMatrix, c2: &SimilarityMatrix, pi: &Matrix, loss: Loss) -> Result<Matrix> {
    let first = contract(&c.matrix, &c2.matrix, pi, loss, Side::SampleSide)?.matrix;
    let second = contract(&c.matrix, &c2.matrix, pi, loss, Side::FeatureSide)?.matrix;
    Ok(Matrix::from_fn(first.rows(), first.cols(), |i, j| {
        first[(i, j)] + second[(i, j)]
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwProblem {
    pub c: SimilarityMatrix,
    pub c2: SimilarityMatrix,
    pub w: Histogram,
    pub w2: Histogram,
    pub loss: Loss,
    /// 0 = exact inner OT (DC / unit-step Frank–Wolfe), > 0 = entropic projected gradient.
    pub eps: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl GwProblem {
    pub fn uniform(c: SimilarityMatrix, c2: SimilarityMatrix, loss: Loss) -> Result<Self> {
        Ok(Self {
            w: Histogram::uniform(c.len())?,
            w2: Histogram::uniform(c2.len())?,
            c,
            c2,
            loss,
            eps: 0.0,
            max_iter: crate::coot::DEFAULT_MAX_ITER,
            tol: crate::coot::DEFAULT_TOL,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.w.len() != self.c.len() || self.w2.len() != self.c2.len() {
            return Err(dim_err!("weights do not match the similarity matrices"));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(domain_err!("eps must be finite and >= 0, got {}", self.eps));
        }
        self.loss.check_domain(self.c.matrix(), self.c2.matrix())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwSolution {
    pub coupling: Coupling,
    pub cost: f64,
    /// Objective at the initial coupling, then after every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Tied-coupling DC iterations from `init`.
pub fn solve_gw_dc(problem: &GwProblem, init: Coupling) -> Result<GwSolution> {
    problem.validate()?;
    if init.shape() != (problem.c.len(), problem.c2.len()) {
        return Err(dim_err!("initial coupling does not match the problem"));
    }
    let GwProblem { c, c2, loss, .. } = problem;
    let mut pi = init;
    let mut trace = alloc::vec![gw_objective(c, c2, pi.plan(), *loss)?];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < problem.max_iter {
        let cost = dc_cost(c, c2, pi.plan(), *loss)?;
        let next = solve_ot(&problem.w, &problem.w2, &cost, problem.eps)?.coupling;
        iterations += 1;
        let delta = pi.plan().frobenius_distance(next.plan())?;
        pi = next;
        trace.push(gw_objective(c, c2, pi.plan(), *loss)?);
        if delta <= problem.tol {
            converged = true;
            break;
        }
    }
    Ok(GwSolution {
        cost: *trace.last().expect("non-empty trace"),
        coupling: pi,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Restart 0 starts from `w w'ᵀ`; restart 1 from a coupling close to the
/// identity when both sides have the same size; the rest from seeded random couplings.
pub fn gw_restart_init(problem: &GwProblem, seed: u64, index: usize) -> Result<Coupling> {
    let square = problem.c.len() == problem.c2.len() && problem.w.is_uniform() && problem.w2.is_uniform();
    match index {
        0 => Ok(Coupling::product(&problem.w, &problem.w2)),
        1 if square => {
            let id: Vec<usize> = (0..problem.c.len()).collect();
            Ok(blend_with_product(&Coupling::from_permutation(&id)?, IDENTITY_BLEND))
        }
        _ => random_coupling(&problem.w, &problem.w2, &mut restart_rng(seed, index)),
    }
}

pub fn solve_gw_restart(problem: &GwProblem, seed: u64, index: usize) -> Result<GwSolution> {
    solve_gw_dc(problem, gw_restart_init(problem, seed, index)?)
}

pub fn solve_gw_multistart<R: RestartRunner>(
    problem: &GwProblem,
    restarts: usize,
    seed: u64,
    runner: &R,
) -> Result<MultiStart<GwSolution>> {
    let results = runner.run(restarts, |r| solve_gw_restart(problem, seed, r));
    collect_best(results, |s| s.cost)
}

/// One DC step and one unit-step Frank–Wolfe step from the same coupling, both
/// solved with [`exact_ot`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepComparison {
    pub dc_cost: Matrix,
    pub fw_gradient: Matrix,
    pub dc_plan: Matrix,
    pub fw_plan: Matrix,
    /// `max |gradient_ij − 2·cost_ij|`.
    pub max_ratio_deviation: f64,
}

pub fn dc_fw_step_comparison(problem: &GwProblem, pi: &Coupling) -> Result<StepComparison> {
    problem.validate()?;
    let GwProblem { c, c2, loss, w, w2, .. } = problem;
    let dc = dc_cost(c, c2, pi.plan(), *loss)?;
    let grad = gw_gradient(c, c2, pi.plan(), *loss)?;
    let max_ratio_deviation = grad.max_abs_diff(&dc.scaled(2.0))?;
    let dc_plan = exact_ot(w, w2, &dc)?.coupling.into_plan();
    // unit step: π + 1·(s − π) = s
    let fw_plan = exact_ot(w, w2, &grad)?.coupling.into_plan();
    Ok(StepComparison {
        dc_cost: dc,
        fw_gradient: grad,
        dc_plan,
        fw_plan,
        max_ratio_deviation,
    })
}

/// `min_σ (1/n²) Σ_ik L(C_ik, C'_{σ(i) σ(k)})` over permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct GwOracle {
    pub cost: f64,
    pub sigma: Vec<usize>,
}

pub fn gw_oracle(c: &SimilarityMatrix, c2: &SimilarityMatrix, loss: Loss) -> Result<GwOracle> {
    let n = c.len();
    if n != c2.len() {
        return Err(dim_err!("GW oracle needs equal sizes, got {n} and {}", c2.len()));
    }
    if n > ORACLE_MAX {
        return Err(Error::OracleTooLarge {
            size: n,
            max: ORACLE_MAX,
        });
    }
    loss.check_domain(c.matrix(), c2.matrix())?;
    let mut best = f64::INFINITY;
    let mut best_sigma = Vec::new();
    for sigma in all_permutations(n) {
        let mut total = 0.0;
        for i in 0..n {
            for k in 0..n {
                total += loss.eval_unchecked(c.matrix[(i, k)], c2.matrix[(sigma[i], sigma[k])]);
            }
        }
        if total < best {
            best = total;
            best_sigma = sigma;
        }
    }
    Ok(GwOracle {
        cost: best / (n * n) as f64,
        sigma: best_sigma,
    })
}

/// Oracle values backing the COOT/GW comparison on one pair of similarity matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// COOT(C, C') by bilinear-assignment enumeration.
    pub coot_value: f64,
    /// GW(C, C') by permutation enumeration.
    pub gw_value: f64,
    /// COOT objective at the tied pair `(π*, π*)` built from the GW optimum.
    pub tied_pair_value: f64,
}

impl EquivalenceReport {
    /// COOT never exceeds GW.
    pub fn coot_le_gw(&self, tol: f64) -> bool {
        self.coot_value <= self.gw_value + tol
    }

    /// Equal values, and the tied GW optimum attains the COOT value.
    pub fn equal(&self, tol: f64) -> bool {
        (self.coot_value - self.gw_value).abs() <= tol && (self.tied_pair_value - self.coot_value).abs() <= tol
    }
}

/// Both oracles on arbitrary symmetric matrices of at most [`EQUIVALENCE_MAX`] points.
pub fn gw_coot_equivalence_matrices(
    c: &SimilarityMatrix,
    c2: &SimilarityMatrix,
    loss: Loss,
) -> Result<EquivalenceReport> {
    let n = c.len().max(c2.len());
    if n > EQUIVALENCE_MAX {
        return Err(Error::OracleTooLarge {
            size: n,
            max: EQUIVALENCE_MAX,
        });
    }
    let coot = bap_oracle(c.matrix(), c2.matrix(), loss)?;
    let gw = gw_oracle(c, c2, loss)?;
    let tied = Coupling::from_permutation(&gw.sigma)?;
    let tied_pair_value = coot_objective(c.matrix(), c2.matrix(), tied.plan(), tied.plan(), loss)?;
    Ok(EquivalenceReport {
        coot_value: coot.cost,
        gw_value: gw.cost,
        tied_pair_value,
    })
}

/// Squared-Euclidean distance matrices of two point clouds, compared with the squared loss.
pub fn gw_coot_equivalence_check(points: &Matrix, points2: &Matrix) -> Result<EquivalenceReport> {
    gw_coot_equivalence_matrices(
        &sqeuclid_matrix(points),
        &sqeuclid_matrix(points2),
        Loss::SquaredEuclidean,
    )
}
