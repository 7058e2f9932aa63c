//! Co-clustering by COOT against a learned `g × m` summary matrix.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coot::{solve_coot_from, CootProblem, CootSolution, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::dim_err;
use crate::tensorcost::coot_objective;
use crate::{Coupling, Histogram, Loss, Matrix, Result};

/// Stop the outer loop once no summary entry moves by more than this.
pub const SUMMARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CoclusterConfig {
    /// Row clusters `g`.
    pub row_clusters: usize,
    /// Column clusters `m`.
    pub col_clusters: usize,
    pub eps_samples: f64,
    pub eps_features: f64,
    pub outer_iter: usize,
    pub inner_max_iter: usize,
    pub inner_tol: f64,
    pub seed: u64,
}

impl CoclusterConfig {
    /// Entropic couplings with `ε = 0.1` on both sides.
    pub fn new(row_clusters: usize, col_clusters: usize, seed: u64) -> Self {
        Self {
            row_clusters,
            col_clusters,
            eps_samples: 0.1,
            eps_features: 0.1,
            outer_iter: 10,
            inner_max_iter: DEFAULT_MAX_ITER,
            inner_tol: DEFAULT_TOL,
            seed,
        }
    }

    pub fn exact(mut self) -> Self {
        self.eps_samples = 0.0;
        self.eps_features = 0.0;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoClustering {
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<usize>,
    /// Summary matrix `X_c`.
    pub xc: Matrix,
    pub solution: CootSolution,
    /// COOT value after each outer round (after the summary update).
    pub objective_trace: Vec<f64>,
    pub rounds: usize,
    /// The summary settled within [`SUMMARY_TOL`] and the last BCD run converged.
    pub converged: bool,
}

/// Minimizer of `Σ_ijkl (X_ik − Xc_jl)² π^s_ij π^v_kl` over `Xc`:
/// `Xc_jl = (π^sᵀ X π^v)_jl / (Σ_i π^s_ij · Σ_k π^v_kl)`,
/// which is `g·m·π^sᵀ X π^v` under uniform cluster weights.
pub fn summary_update(x: &Matrix, pi_s: &Matrix, pi_v: &Matrix) -> Result<Matrix> {
    if pi_s.rows() != x.rows() || pi_v.rows() != x.cols() {
        return Err(dim_err!(
            "couplings do not match a {}x{} data matrix",
            x.rows(),
            x.cols()
        ));
    }
    let weighted = pi_s.t_matmul(x)?.matmul(pi_v)?;
    let row_mass = pi_s.col_sums();
    let col_mass = pi_v.col_sums();
    Ok(Matrix::from_fn(weighted.rows(), weighted.cols(), |j, l| {
        weighted[(j, l)] / (row_mass[j] * col_mass[l])
    }))
}

/// Alternates BCD on `COOT(X, Xc)` (warm-started from the previous couplings) with
/// the closed-form summary update, then reads hard labels off the couplings.
pub fn cocluster(x: &Matrix, config: &CoclusterConfig) -> Result<CoClustering> {
    let (g, m) = (config.row_clusters, config.col_clusters);
    if g == 0 || m == 0 || g > x.rows() || m > x.cols() {
        return Err(dim_err!(
            "need 1 <= g <= {} and 1 <= m <= {}, got g={g}, m={m}",
            x.rows(),
            x.cols()
        ));
    }
    let (lo, hi) = (x.min(), x.max());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut xc = Matrix::from_fn(g, m, |_, _| if hi > lo { rng.random_range(lo..hi) } else { lo });

    let w = Histogram::uniform(x.rows())?;
    let v = Histogram::uniform(x.cols())?;
    let wc = Histogram::uniform(g)?;
    let vc = Histogram::uniform(m)?;
    let mut pi_s = Coupling::product(&w, &wc);
    let mut pi_v = Coupling::product(&v, &vc);

    let mut trace = Vec::new();
    let mut solution = None;
    let mut rounds = 0;
    let mut settled = false;
    while rounds < config.outer_iter.max(1) {
        let problem = CootProblem {
            x: x.clone(),
            x2: xc.clone(),
            w: w.clone(),
            w2: wc.clone(),
            v: v.clone(),
            v2: vc.clone(),
            loss: Loss::SquaredEuclidean,
            eps_samples: config.eps_samples,
            eps_features: config.eps_features,
            max_iter: config.inner_max_iter,
            tol: config.inner_tol,
        };
        let sol = solve_coot_from(&problem, pi_s, pi_v)?;
        let next = summary_update(x, sol.pi_s.plan(), sol.pi_v.plan())?;
        let change = next.max_abs_diff(&xc)?;
        xc = next;
        pi_s = sol.pi_s.clone();
        pi_v = sol.pi_v.clone();
        trace.push(coot_objective(
            x,
            &xc,
            pi_s.plan(),
            pi_v.plan(),
            Loss::SquaredEuclidean,
        )?);
        solution = Some(sol);
        rounds += 1;
        if change <= SUMMARY_TOL {
            settled = true;
            break;
        }
    }

    let mut solution: CootSolution = solution.expect("at least one round runs");
    let converged = settled && solution.converged && solution.inner_converged;
    solution.cost = *trace.last().expect("one entry per round");
    Ok(CoClustering {
        row_labels: pi_s.row_argmax(),
        col_labels: pi_v.row_argmax(),
        xc,
        solution,
        objective_trace: trace,
        rounds,
        converged,
    })
}
