//! Co-optimal transport by block coordinate descent.
//!
//! Each iteration alternates two linear OT problems:
//!
//! 1. `π^v ← OT(v, v', L(X,X') ⊗ π^s)` on the features,
//! 2. `π^s ← OT(w, w', L(X,X') ⊗ π^v)` on the samples, using the fresh `π^v`.
//!
//! With exact inner solvers every half-step minimizes the bilinear objective over
//! one block, so the objective never increases. The problem is not convex, so
//! [`solve_coot_multistart`] keeps the best of several seeded starts.

use alloc::vec::Vec;

use crate::error::dim_err;
use crate::ot::solve_ot;
use crate::perm::all_permutations;
use crate::restart::{random_coupling, restart_rng, select_best, RestartRunner};
use crate::tensorcost::{contract, coot_objective, Side};
use crate::{Coupling, Error, Histogram, Loss, Matrix, Result};

pub const DEFAULT_MAX_ITER: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-7;

/// Largest side accepted by [`bap_oracle`].
pub const ORACLE_MAX: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct CootProblem {
    pub x: Matrix,
    pub x2: Matrix,
    /// Sample weights of `x` and `x2`.
    pub w: Histogram,
    pub w2: Histogram,
    /// Feature weights of `x` and `x2`.
    pub v: Histogram,
    pub v2: Histogram,
    pub loss: Loss,
    /// Entropic strength on the sample coupling (0 = exact OT).
    pub eps_samples: f64,
    /// Entropic strength on the feature coupling (0 = exact OT).
    pub eps_features: f64,
    pub max_iter: usize,
    /// Stop once `‖π^v_(k−1) − π^v_(k)‖_F` is at most this.
    pub tol: f64,
}

impl CootProblem {
    /// Uniform weights on all four marginals, exact inner solvers, default stopping rule.
    pub fn uniform(x: Matrix, x2: Matrix, loss: Loss) -> Result<Self> {
        Ok(Self {
            w: Histogram::uniform(x.rows())?,
            w2: Histogram::uniform(x2.rows())?,
            v: Histogram::uniform(x.cols())?,
            v2: Histogram::uniform(x2.cols())?,
            x,
            x2,
            loss,
            eps_samples: 0.0,
            eps_features: 0.0,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_eps(mut self, eps_samples: f64, eps_features: f64) -> Self {
        self.eps_samples = eps_samples;
        self.eps_features = eps_features;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("w", self.w.len(), self.x.rows()),
            ("w'", self.w2.len(), self.x2.rows()),
            ("v", self.v.len(), self.x.cols()),
            ("v'", self.v2.len(), self.x2.cols()),
        ];
        for (name, got, want) in dims {
            if got != want {
                return Err(dim_err!("{name} has length {got}, expected {want}"));
            }
        }
        for (name, eps) in [("eps_samples", self.eps_samples), ("eps_features", self.eps_features)] {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::Domain(alloc::format!(
                    "{name} must be finite and >= 0, got {eps}"
                )));
            }
        }
        self.loss.check_domain(&self.x, &self.x2)
    }

    pub fn is_exact(&self) -> bool {
        self.eps_samples == 0.0 && self.eps_features == 0.0
    }

    pub fn product_init(&self) -> (Coupling, Coupling) {
        (
            Coupling::product(&self.w, &self.w2),
            Coupling::product(&self.v, &self.v2),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CootSolution {
    /// `n × n'` sample coupling.
    pub pi_s: Coupling,
    /// `d × d'` feature coupling.
    pub pi_v: Coupling,
    /// Unregularized objective at `(pi_s, pi_v)`.
    pub cost: f64,
    /// Objective at the initial pair, then after every iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// The stopping rule on `π^v` fired before `max_iter`.
    pub converged: bool,
    /// Every inner Sinkhorn call met its tolerance (always true for exact solves).
    pub inner_converged: bool,
}

/// Hook applied to the sample-side cost before each `π^s` update.
pub type SampleCostAdjust<'a> = &'a (dyn Fn(&Matrix) -> Result<Matrix> + Sync);

/// BCD from the product couplings `w w'ᵀ`, `v v'ᵀ`.
pub fn solve_coot(problem: &CootProblem) -> Result<CootSolution> {
    let (pi_s, pi_v) = problem.product_init();
    solve_coot_from(problem, pi_s, pi_v)
}

/// BCD from a caller-supplied starting pair.
pub fn solve_coot_from(problem: &CootProblem, pi_s: Coupling, pi_v: Coupling) -> Result<CootSolution> {
    bcd(problem, pi_s, pi_v, None)
}

/// BCD with the sample-side cost passed through `adjust` at every iteration.
pub fn solve_coot_adjusted(
    problem: &CootProblem,
    pi_s: Coupling,
    pi_v: Coupling,
    adjust: SampleCostAdjust<'_>,
) -> Result<CootSolution> {
    bcd(problem, pi_s, pi_v, Some(adjust))
}

fn bcd(
    problem: &CootProblem,
    mut pi_s: Coupling,
    mut pi_v: Coupling,
    adjust: Option<SampleCostAdjust<'_>>,
) -> Result<CootSolution> {
    problem.validate()?;
    if pi_s.shape() != (problem.x.rows(), problem.x2.rows()) || pi_v.shape() != (problem.x.cols(), problem.x2.cols()) {
        return Err(dim_err!("initial couplings do not match the problem dimensions"));
    }
    let CootProblem { x, x2, loss, .. } = problem;
    let objective = |s: &Coupling, v: &Coupling| coot_objective(x, x2, s.plan(), v.plan(), *loss);

    let mut trace = alloc::vec![objective(&pi_s, &pi_v)?];
    let mut converged = false;
    let mut inner_converged = true;
    let mut iterations = 0;

    while iterations < problem.max_iter {
        let feature_cost = contract(x, x2, pi_s.plan(), *loss, Side::FeatureSide)?.matrix;
        let next_v = solve_ot(&problem.v, &problem.v2, &feature_cost, problem.eps_features)?;
        inner_converged &= next_v.converged;

        let mut sample_cost = contract(x, x2, next_v.coupling.plan(), *loss, Side::SampleSide)?.matrix;
        if let Some(adjust) = adjust {
            sample_cost = adjust(&sample_cost)?;
        }
        let next_s = solve_ot(&problem.w, &problem.w2, &sample_cost, problem.eps_samples)?;
        inner_converged &= next_s.converged;

        iterations += 1;
        let delta = pi_v.plan().frobenius_distance(next_v.coupling.plan())?;
        pi_v = next_v.coupling;
        pi_s = next_s.coupling;
        trace.push(objective(&pi_s, &pi_v)?);
        if delta <= problem.tol {
            converged = true;
            break;
        }
    }

    Ok(CootSolution {
        cost: *trace.last().expect("trace starts with the initial objective"),
        pi_s,
        pi_v,
        objective_trace: trace,
        iterations,
        converged,
        inner_converged,
    })
}

/// Starting pair of restart `index`: the product couplings for index 0, seeded
/// random couplings otherwise.
pub fn restart_init(problem: &CootProblem, seed: u64, index: usize) -> Result<(Coupling, Coupling)> {
    if index == 0 {
        return Ok(problem.product_init());
    }
    let mut rng = restart_rng(seed, index);
    let pi_s = random_coupling(&problem.w, &problem.w2, &mut rng)?;
    let pi_v = random_coupling(&problem.v, &problem.v2, &mut rng)?;
    Ok((pi_s, pi_v))
}

/// One restart of a seeded multi-start run.
pub fn solve_coot_restart(problem: &CootProblem, seed: u64, index: usize) -> Result<CootSolution> {
    let (pi_s, pi_v) = restart_init(problem, seed, index)?;
    solve_coot_from(problem, pi_s, pi_v)
}

/// Outcome of a multi-start run.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStart<T> {
    pub best: T,
    pub best_index: usize,
    /// Final cost of every restart, in restart order.
    pub costs: Vec<f64>,
}

/// Picks the minimum-cost result (lowest index on ties) from per-restart results.
pub fn collect_best<T>(results: Vec<Result<T>>, cost: impl Fn(&T) -> f64) -> Result<MultiStart<T>> {
    let results = results.into_iter().collect::<Result<Vec<T>>>()?;
    let costs: Vec<f64> = results.iter().map(&cost).collect();
    let best_index = select_best(&costs).ok_or_else(|| Error::Config("at least one restart is required".into()))?;
    let best = results.into_iter().nth(best_index).expect("index from the same vector");
    Ok(MultiStart {
        best,
        best_index,
        costs,
    })
}

/// Runs `restarts` seeded BCD starts through `runner` and keeps the cheapest.
pub fn solve_coot_multistart<R: RestartRunner>(
    problem: &CootProblem,
    restarts: usize,
    seed: u64,
    runner: &R,
) -> Result<MultiStart<CootSolution>> {
    let results = runner.run(restarts, |r| solve_coot_restart(problem, seed, r));
    collect_best(results, |s| s.cost)
}

/// Exact minimum of the bilinear assignment problem, by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BapSolution {
    pub cost: f64,
    /// Row `i` of `X` is matched with row `sigma_rows[i]` of `X'`.
    pub sigma_rows: Vec<usize>,
    /// Column `k` of `X` is matched with column `sigma_cols[k]` of `X'`.
    pub sigma_cols: Vec<usize>,
}

/// `min_{σ1,σ2} (1/(n d)) Σ_ik L(X_ik, X'_{σ1(i) σ2(k)})` over all permutation pairs.
///
/// This is the COOT value for equal shapes and uniform weights. The first optimum
/// in lexicographic order wins, so the identity is returned whenever it is optimal.
pub fn bap_oracle(x: &Matrix, x2: &Matrix, loss: Loss) -> Result<BapSolution> {
    if x.shape() != x2.shape() {
        return Err(dim_err!(
            "oracle needs equal shapes, got {:?} and {:?}",
            x.shape(),
            x2.shape()
        ));
    }
    let (n, d) = x.shape();
    let size = n.max(d);
    if size > ORACLE_MAX {
        return Err(Error::OracleTooLarge { size, max: ORACLE_MAX });
    }
    loss.check_domain(x, x2)?;

    let row_perms = all_permutations(n);
    let col_perms = all_permutations(d);
    let mut best = f64::INFINITY;
    let mut best_rows = 0;
    let mut best_cols = 0;
    let mut assign = alloc::vec![0.0; d * d];
    for (ri, s1) in row_perms.iter().enumerate() {
        // assign[k][l] = Σ_i L(X_ik, X'_{σ1(i), l})
        assign.iter_mut().for_each(|a| *a = 0.0);
        for (i, &si) in s1.iter().enumerate() {
            for k in 0..d {
                for l in 0..d {
                    assign[k * d + l] += loss.eval_unchecked(x[(i, k)], x2[(si, l)]);
                }
            }
        }
        for (ci, s2) in col_perms.iter().enumerate() {
            let total: f64 = s2.iter().enumerate().map(|(k, &l)| assign[k * d + l]).sum();
            if total < best {
                best = total;
                best_rows = ri;
                best_cols = ci;
            }
        }
    }
    Ok(BapSolution {
        cost: best / (n * d) as f64,
        sigma_rows: row_perms[best_rows].clone(),
        sigma_cols: col_perms[best_cols].clone(),
    })
}

/// True if some row and column permutation of `x2` reproduces `x` exactly.
pub fn permutation_equal(x: &Matrix, x2: &Matrix) -> Result<bool> {
    if x.shape() != x2.shape() {
        return Ok(false);
    }
    let (n, d) = x.shape();
    if n.max(d) > ORACLE_MAX {
        return Err(Error::OracleTooLarge {
            size: n.max(d),
            max: ORACLE_MAX,
        });
    }
    let col_perms = all_permutations(d);
    Ok(all_permutations(n).iter().any(|s1| {
        col_perms
            .iter()
            .any(|s2| (0..n).all(|i| (0..d).all(|k| x[(i, k)] == x2[(s1[i], s2[k])])))
    }))
}

/// Oracle-based check of the metric axioms over a set of matrix triples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistanceReport {
    pub triples: usize,
    /// Largest `|COOT(A,B) − COOT(B,A)|` seen.
    pub max_symmetry_gap: f64,
    /// Pairs where "COOT = 0" and "permutation-equal" disagree.
    pub identity_violations: usize,
    /// Pairs found to be at distance zero.
    pub zero_pairs: usize,
    /// Triangle inequalities violated by more than [`TRIANGLE_SLACK`].
    pub triangle_violations: usize,
    /// Largest `COOT(A,C) − COOT(A,B) − COOT(B,C)` seen.
    pub max_triangle_excess: f64,
}

pub const TRIANGLE_SLACK: f64 = 1e-9;
/// Distances at or below this count as zero in the identity check.
pub const ZERO_TOL: f64 = 1e-12;

impl DistanceReport {
    pub fn holds(&self) -> bool {
        self.max_symmetry_gap <= 1e-12 && self.identity_violations == 0 && self.triangle_violations == 0
    }
}

/// Symmetry, identity of indiscernibles and the triangle inequality, checked with
/// [`bap_oracle`] on every triple (all three pairs in both orders, all three
/// triangle inequalities).
pub fn coot_distance_checks(triples: &[[Matrix; 3]], loss: Loss) -> Result<DistanceReport> {
    let mut report = DistanceReport {
        triples: triples.len(),
        ..Default::default()
    };
    for t in triples {
        let mut d = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    d[a][b] = bap_oracle(&t[a], &t[b], loss)?.cost;
                }
            }
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            report.max_symmetry_gap = report.max_symmetry_gap.max((d[a][b] - d[b][a]).abs());
            let zero = d[a][b] <= ZERO_TOL;
            report.zero_pairs += usize::from(zero);
            if zero != permutation_equal(&t[a], &t[b])? {
                report.identity_violations += 1;
            }
        }
        for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 0, 2)] {
            let excess = d[a][c] - d[a][b] - d[b][c];
            report.max_triangle_excess = report.max_triangle_excess.max(excess);
            if excess > TRIANGLE_SLACK {
                report.triangle_violations += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restart::Sequential;

    #[test]
    fn oracle_examples() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [2.0, 3.0]]).unwrap();
        let same = bap_oracle(&x, &x, Loss::SquaredEuclidean).unwrap();
        assert_eq!(same.cost, 0.0);
        assert_eq!(same.sigma_rows, [0, 1]);
        assert_eq!(same.sigma_cols, [0, 1]);

        let swapped = x.permuted(&[1, 0], &[1, 0]).unwrap();
        let s = bap_oracle(&x, &swapped, Loss::SquaredEuclidean).unwrap();
        assert_eq!(s.cost, 0.0);
        assert_eq!(s.sigma_rows, [1, 0]);
        assert_eq!(s.sigma_cols, [1, 0]);
    }

    #[test]
    fn oracle_refuses_large_or_mismatched() {
        let big = Matrix::zeros(7, 2);
        assert!(matches!(
            bap_oracle(&big, &big, Loss::Absolute),
            Err(Error::OracleTooLarge { size: 7, max: 6 })
        ));
        assert!(bap_oracle(&Matrix::zeros(2, 2), &Matrix::zeros(2, 3), Loss::Absolute).is_err());
    }

    #[test]
    fn identical_2x2_reaches_zero() {
        let x = Matrix::from_rows(&[[0.3, 1.7], [-0.4, 2.2]]).unwrap();
        let p = CootProblem::uniform(x.clone(), x.clone(), Loss::SquaredEuclidean).unwrap();
        let sol = solve_coot(&p).unwrap();
        assert_eq!(bap_oracle(&x, &x, Loss::SquaredEuclidean).unwrap().cost, 0.0);
        assert!(sol.cost <= 1e-12, "cost {}", sol.cost);
        assert!(sol.converged);
    }

    #[test]
    fn permuted_copy_has_zero_objective_at_the_permutations() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.5], [0.5, -1.0, 2.0]]).unwrap();
        let rows = [2, 0, 1];
        let cols = [1, 2, 0];
        let x2 = x
            .permuted(&crate::perm::inverse(&rows), &crate::perm::inverse(&cols))
            .unwrap();
        // X'[σ1(i)][σ2(k)] = X[i][k]
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(x2[(rows[i], cols[k])], x[(i, k)]);
            }
        }
        let ps = Coupling::from_permutation(&rows).unwrap();
        let pv = Coupling::from_permutation(&cols).unwrap();
        for loss in [Loss::SquaredEuclidean, Loss::Absolute] {
            assert_eq!(coot_objective(&x, &x2, ps.plan(), pv.plan(), loss).unwrap(), 0.0);
        }
    }

    #[test]
    fn max_iter_zero_returns_product_init() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 0.0]]).unwrap();
        let y = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let p = CootProblem::uniform(x.clone(), y.clone(), Loss::SquaredEuclidean)
            .unwrap()
            .with_max_iter(0);
        let sol = solve_coot(&p).unwrap();
        let (s, v) = p.product_init();
        assert_eq!(sol.pi_s, s);
        assert_eq!(sol.pi_v, v);
        assert_eq!(sol.iterations, 0);
        assert!(!sol.converged);
        assert_eq!(
            sol.cost,
            coot_objective(&x, &y, s.plan(), v.plan(), Loss::SquaredEuclidean).unwrap()
        );
    }

    #[test]
    fn degenerate_single_column_target() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 0.0]]).unwrap();
        let y = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let p = CootProblem::uniform(x, y, Loss::SquaredEuclidean).unwrap();
        let sol = solve_coot(&p).unwrap();
        assert!(sol.pi_v.is_feasible(1e-12));
        assert!(sol.pi_s.is_feasible(1e-12));
        assert_eq!(sol.pi_v.plan().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn multistart_is_order_independent_and_reproducible() {
        let x = Matrix::from_rows(&[[0.1, 0.9, 0.3], [0.5, 0.2, 0.8], [0.7, 0.4, 0.6]]).unwrap();
        let y = Matrix::from_rows(&[[0.6, 0.2, 0.1], [0.3, 0.9, 0.5], [0.8, 0.4, 0.7]]).unwrap();
        let p = CootProblem::uniform(x, y, Loss::SquaredEuclidean).unwrap();
        let a = solve_coot_multistart(&p, 6, 42, &Sequential).unwrap();
        let b = solve_coot_multistart(&p, 6, 42, &Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.costs.len(), 6);
        assert_eq!(a.best.cost, a.costs[a.best_index]);
        assert!(a.costs.iter().all(|&c| c >= a.best.cost));
        let single = solve_coot_restart(&p, 42, 3).unwrap();
        assert_eq!(single.cost, a.costs[3]);
    }

    #[test]
    fn distance_checks_on_identical_triple() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [2.0, 5.0]]).unwrap();
        let r = coot_distance_checks(&[[x.clone(), x.clone(), x]], Loss::Absolute).unwrap();
        assert!(r.holds());
        assert_eq!(r.zero_pairs, 3);
        assert_eq!(r.max_triangle_excess, 0.0);
    }

    #[test]
    fn invalid_problem_is_rejected() {
        let x = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let mut p = CootProblem::uniform(x.clone(), x, Loss::Absolute).unwrap();
        p.eps_features = -1.0;
        assert!(matches!(solve_coot(&p), Err(Error::Domain(_))));
        p.eps_features = 0.0;
        p.v = Histogram::uniform(3).unwrap();
        assert!(matches!(solve_coot(&p), Err(Error::InvalidDimension(_))));
    }
}
