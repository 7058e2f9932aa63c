//! Solvers for the linear OT subproblems `min_{π ∈ Π(w,w')} ⟨C, π⟩ (+ ε·KL(π | w w'ᵀ))`.

mod network_simplex;
mod sinkhorn;

use alloc::vec::Vec;

use crate::error::{dim_err, domain_err};
use crate::{Coupling, Histogram, Matrix, Result};

/// Default Sinkhorn iteration cap.
pub const SINKHORN_MAX_ITER: usize = 10_000;
/// Default Sinkhorn stopping threshold on the L1 marginal residual.
pub const SINKHORN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OtResult {
    pub coupling: Coupling,
    /// `⟨C, π⟩` of the returned plan (entropy excluded).
    pub cost: f64,
    /// Simplex pivots or Sinkhorn iterations.
    pub iterations: usize,
    pub converged: bool,
}

fn check_problem(w: &Histogram, w2: &Histogram, cost: &Matrix) -> Result<()> {
    if cost.shape() != (w.len(), w2.len()) {
        return Err(dim_err!(
            "cost is {}x{} but marginals have lengths {} and {}",
            cost.rows(),
            cost.cols(),
            w.len(),
            w2.len()
        ));
    }
    if cost.as_slice().iter().any(|c| !c.is_finite()) {
        return Err(domain_err!("cost matrix has non-finite entries"));
    }
    Ok(())
}

/// Exact OT by network simplex. The plan is a vertex of the transport polytope.
pub fn exact_ot(w: &Histogram, w2: &Histogram, cost: &Matrix) -> Result<OtResult> {
    check_problem(w, w2, cost)?;
    let sol = exact_raw(w, w2, cost);
    let plan = Matrix::from_raw(w.len(), w2.len(), sol.flow);
    let total = plan.dot(cost)?;
    Ok(OtResult {
        coupling: Coupling::from_solver(plan, w, w2),
        cost: total,
        iterations: sol.pivots,
        converged: sol.optimal,
    })
}

fn exact_raw(w: &Histogram, w2: &Histogram, cost: &Matrix) -> network_simplex::Solution {
    let arcs = w.len() * w2.len();
    let max_pivots = 1000 * arcs + 100_000;
    network_simplex::NetworkSimplex::new(w, w2, cost.as_slice()).run(max_pivots)
}

/// Entropic OT by log-domain Sinkhorn.
///
/// Stops once the L1 marginal residual is at most `tol`; `converged` is false if
/// `max_iter` came first.
pub fn sinkhorn(w: &Histogram, w2: &Histogram, cost: &Matrix, eps: f64, max_iter: usize, tol: f64) -> Result<OtResult> {
    sinkhorn_traced(w, w2, cost, eps, max_iter, tol).map(|(r, _)| r)
}

/// [`sinkhorn`] that also returns the residual after every iteration.
pub fn sinkhorn_traced(
    w: &Histogram,
    w2: &Histogram,
    cost: &Matrix,
    eps: f64,
    max_iter: usize,
    tol: f64,
) -> Result<(OtResult, Vec<f64>)> {
    check_problem(w, w2, cost)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain_err!("sinkhorn needs eps > 0, got {eps}"));
    }
    let out = sinkhorn::solve(w, w2, cost, eps, max_iter, tol);
    if out.plan.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(domain_err!("sinkhorn produced a non-finite plan"));
    }
    let total = out.plan.dot(cost)?;
    let result = OtResult {
        coupling: Coupling::from_solver(out.plan, w, w2),
        cost: total,
        iterations: out.iterations,
        converged: out.converged,
    };
    Ok((result, out.residuals))
}

/// Exact OT when `eps == 0`, Sinkhorn with default settings otherwise.
pub fn solve_ot(w: &Histogram, w2: &Histogram, cost: &Matrix, eps: f64) -> Result<OtResult> {
    if eps == 0.0 {
        exact_ot(w, w2, cost)
    } else {
        sinkhorn(w, w2, cost, eps, SINKHORN_MAX_ITER, SINKHORN_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::marginal_residual;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_histogram(rng: &mut ChaCha8Rng, n: usize) -> Histogram {
        Histogram::normalized((0..n).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap()
    }

    #[test]
    fn exact_examples() {
        let u1 = Histogram::uniform(1).unwrap();
        let r = exact_ot(&u1, &u1, &Matrix::from_rows(&[[5.0]]).unwrap()).unwrap();
        assert_eq!(r.coupling.plan().as_slice(), &[1.0]);
        assert_eq!(r.cost, 5.0);

        let u2 = Histogram::uniform(2).unwrap();
        let c = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let r = exact_ot(&u2, &u2, &c).unwrap();
        assert_eq!(r.coupling.plan().as_slice(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(r.cost, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn exact_errors() {
        let u2 = Histogram::uniform(2).unwrap();
        let u3 = Histogram::uniform(3).unwrap();
        assert!(matches!(
            exact_ot(&u2, &u3, &Matrix::zeros(2, 2)),
            Err(crate::Error::InvalidDimension(_))
        ));
        assert!(matches!(
            sinkhorn(&u2, &u2, &Matrix::zeros(2, 2), 0.0, 10, 1e-9),
            Err(crate::Error::Domain(_))
        ));
    }

    /// Complementary slackness certifies optimality independently of the pivoting.
    #[test]
    fn exact_duals_certify_optimality_on_rectangular_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let n = rng.random_range(1..12);
            let m = rng.random_range(1..12);
            let w = random_histogram(&mut rng, n);
            let w2 = random_histogram(&mut rng, m);
            let cost = Matrix::from_fn(n, m, |_, _| {
                if trial % 3 == 0 {
                    rng.random_range(0..4) as f64
                } else {
                    rng.random_range(-5.0..5.0)
                }
            });
            let sol = exact_raw(&w, &w2, &cost);
            assert!(sol.optimal);
            let shift = cost.min();
            let plan = Matrix::from_raw(n, m, sol.flow.clone());
            assert!(marginal_residual(&plan, &w, &w2) < 1e-12, "trial {trial}");
            for i in 0..n {
                for j in 0..m {
                    let reduced = cost[(i, j)] - shift + sol.potentials[i] - sol.potentials[n + j];
                    assert!(reduced >= -1e-9, "trial {trial}: negative reduced cost {reduced}");
                    if plan[(i, j)] > 1e-12 {
                        assert!(reduced.abs() <= 1e-9, "trial {trial}: slack on support {reduced}");
                    }
                }
            }
        }
    }

    #[test]
    fn exact_uniform_square_is_a_scaled_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            let u = Histogram::uniform(n).unwrap();
            let cost = Matrix::from_fn(n, n, |_, _| rng.random::<f64>());
            let r = exact_ot(&u, &u, &cost).unwrap();
            for row in r.coupling.plan().iter_rows() {
                let nz: Vec<_> = row.iter().filter(|&&x| x > 0.0).collect();
                assert_eq!(nz.len(), 1);
                assert!((nz[0] - 1.0 / n as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sinkhorn_constant_cost_gives_product() {
        let w = Histogram::new(vec![0.2, 0.3, 0.5]).unwrap();
        let w2 = Histogram::new(vec![0.6, 0.4]).unwrap();
        for eps in [0.01, 1.0, 10.0] {
            let r = sinkhorn(&w, &w2, &Matrix::filled(3, 2, 3.7), eps, 100, 1e-12).unwrap();
            let product = Coupling::product(&w, &w2);
            assert!(r.coupling.plan().max_abs_diff(product.plan()).unwrap() < 1e-15);
            assert!(r.converged);
        }
    }

    #[test]
    fn sinkhorn_small_eps_approaches_exact() {
        let u2 = Histogram::uniform(2).unwrap();
        let c = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let r = sinkhorn(&u2, &u2, &c, 1e-3, SINKHORN_MAX_ITER, SINKHORN_TOL).unwrap();
        let exact = exact_ot(&u2, &u2, &c).unwrap();
        assert!((r.cost - exact.cost).abs() < 1e-2);
    }

    #[test]
    fn sinkhorn_feasible_and_residual_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.random_range(1..10);
            let m = rng.random_range(1..10);
            let w = random_histogram(&mut rng, n);
            let w2 = random_histogram(&mut rng, m);
            let cost = Matrix::from_fn(n, m, |_, _| rng.random_range(0.0..3.0));
            let eps = [0.05, 0.5, 5.0][rng.random_range(0..3)];
            let (r, trace) = sinkhorn_traced(&w, &w2, &cost, eps, SINKHORN_MAX_ITER, SINKHORN_TOL).unwrap();
            assert!(r.converged);
            assert!(r.coupling.residual() <= 1e-9 + 1e-14);
            assert!(r.coupling.is_feasible(1e-9));
            for pair in trace.windows(2) {
                assert!(pair[1] <= pair[0] * (1.0 + 1e-9) + 1e-15, "{pair:?}");
            }
            assert!((r.cost - r.coupling.plan().dot(&cost).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn sinkhorn_never_produces_nan_at_tiny_eps() {
        let u = Histogram::uniform(3).unwrap();
        let c = Matrix::from_rows(&[[0.0, 100.0, 50.0], [100.0, 0.0, 75.0], [3.0, 8.0, 0.0]]).unwrap();
        let r = sinkhorn(&u, &u, &c, 1e-4, 200, 1e-9).unwrap();
        assert!(r.coupling.plan().as_slice().iter().all(|x| x.is_finite()));
    }
}
