//! The contracted cost `L(X,X') ⊗ π` that drives each block update.
//!
//! With `X` of size `n×d` and `X'` of size `n'×d'`:
//!
//! * [`Side::FeatureSide`] contracts a sample coupling (`n×n'`) into a `d×d'` cost
//!   `M_kl = Σ_ij L(X_ik, X'_jl) π_ij`;
//! * [`Side::SampleSide`] contracts a feature coupling (`d×d'`) into an `n×n'` cost
//!   `M_ij = Σ_kl L(X_ik, X'_jl) π_kl`.
//!
//! The naive path costs `O(n n' d d')`. For losses of the form
//! `f1(a) + f2(b) − h1(a) h2(b)` the factored path needs two matrix products,
//! associated in whichever order needs fewer flops.

use alloc::vec::Vec;

use crate::error::dim_err;
use crate::{Error, Loss, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Contract a sample coupling; the result is indexed by features.
    FeatureSide,
    /// Contract a feature coupling; the result is indexed by samples.
    SampleSide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractedCost {
    pub matrix: Matrix,
    pub side: Side,
}

fn check_dims(x: &Matrix, x2: &Matrix, plan: &Matrix, side: Side) -> Result<()> {
    let expected = match side {
        Side::FeatureSide => (x.rows(), x2.rows()),
        Side::SampleSide => (x.cols(), x2.cols()),
    };
    if plan.shape() != expected {
        return Err(dim_err!(
            "{side:?} contraction of {}x{} with {}x{} needs a {}x{} coupling, got {}x{}",
            x.rows(),
            x.cols(),
            x2.rows(),
            x2.cols(),
            expected.0,
            expected.1,
            plan.rows(),
            plan.cols()
        ));
    }
    Ok(())
}

/// Direct quadruple sum.
pub fn contract_naive(x: &Matrix, x2: &Matrix, plan: &Matrix, loss: Loss, side: Side) -> Result<ContractedCost> {
    check_dims(x, x2, plan, side)?;
    loss.check_domain(x, x2)?;
    let matrix = match side {
        Side::FeatureSide => {
            let (d, d2) = (x.cols(), x2.cols());
            let mut out = alloc::vec![0.0; d * d2];
            for i in 0..x.rows() {
                let xi = x.row(i);
                for (j, &p) in plan.row(i).iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    let xj = x2.row(j);
                    for (k, &a) in xi.iter().enumerate() {
                        let o = &mut out[k * d2..(k + 1) * d2];
                        for (ol, &b) in o.iter_mut().zip(xj) {
                            *ol += loss.eval_unchecked(a, b) * p;
                        }
                    }
                }
            }
            Matrix::from_raw(d, d2, out)
        }
        Side::SampleSide => {
            let (n, n2) = (x.rows(), x2.rows());
            let mut out = Vec::with_capacity(n * n2);
            for i in 0..n {
                let xi = x.row(i);
                for j in 0..n2 {
                    let xj = x2.row(j);
                    let mut s = 0.0;
                    for (k, &a) in xi.iter().enumerate() {
                        for (&p, &b) in plan.row(k).iter().zip(xj) {
                            if p != 0.0 {
                                s += loss.eval_unchecked(a, b) * p;
                            }
                        }
                    }
                    out.push(s);
                }
            }
            Matrix::from_raw(n, n2, out)
        }
    };
    Ok(ContractedCost { matrix, side })
}

/// Factored evaluation through the loss decomposition.
pub fn contract_factored(x: &Matrix, x2: &Matrix, plan: &Matrix, loss: Loss, side: Side) -> Result<ContractedCost> {
    check_dims(x, x2, plan, side)?;
    let dec = loss.decomposition().ok_or(Error::UnsupportedLoss(loss.name()))?;
    loss.check_domain(x, x2)?;

    let row_mass = plan.row_sums();
    let col_mass = plan.col_sums();
    let h1 = x.map(dec.h1);
    let h2 = x2.map(dec.h2);

    let matrix = match side {
        Side::FeatureSide => {
            // A_k = Σ_i f1(X_ik) w_i,  B_l = Σ_j f2(X'_jl) w'_j,  H = h1(X)ᵀ π h2(X')
            let a = x.map(dec.f1).t_matvec(&row_mass)?;
            let b = x2.map(dec.f2).t_matvec(&col_mass)?;
            let (n, n2, d, d2) = (x.rows(), x2.rows(), x.cols(), x2.cols());
            let left_first = d * n * n2 + d * n2 * d2;
            let right_first = n * n2 * d2 + d * n * d2;
            let h = if left_first <= right_first {
                h1.t_matmul(plan)?.matmul(&h2)?
            } else {
                h1.t_matmul(&plan.matmul(&h2)?)?
            };
            combine(h, &a, &b)
        }
        Side::SampleSide => {
            // A_i = Σ_k f1(X_ik) v_k,  B_j = Σ_l f2(X'_jl) v'_l,  H = h1(X) π h2(X')ᵀ
            let a = x.map(dec.f1).matvec(&row_mass)?;
            let b = x2.map(dec.f2).matvec(&col_mass)?;
            let (n, n2, d, d2) = (x.rows(), x2.rows(), x.cols(), x2.cols());
            let left_first = n * d * d2 + n * d2 * n2;
            let right_first = d * d2 * n2 + n * d * n2;
            let h = if left_first <= right_first {
                h1.matmul(plan)?.matmul_t(&h2)?
            } else {
                h1.matmul(&plan.matmul_t(&h2)?)?
            };
            combine(h, &a, &b)
        }
    };
    Ok(ContractedCost { matrix, side })
}

fn combine(mut h: Matrix, a: &[f64], b: &[f64]) -> Matrix {
    for (i, &ai) in a.iter().enumerate() {
        for (x, &bj) in h.row_mut(i).iter_mut().zip(b) {
            *x = ai + bj - *x;
        }
    }
    h
}

/// Factored path when the loss allows it, naive otherwise.
pub fn contract(x: &Matrix, x2: &Matrix, plan: &Matrix, loss: Loss, side: Side) -> Result<ContractedCost> {
    if loss.decomposition().is_some() {
        contract_factored(x, x2, plan, loss, side)
    } else {
        contract_naive(x, x2, plan, loss, side)
    }
}

/// `⟨L(X,X') ⊗ π^s, π^v⟩ = Σ_ijkl L(X_ik, X'_jl) π^s_ij π^v_kl`.
pub fn coot_objective(x: &Matrix, x2: &Matrix, pi_s: &Matrix, pi_v: &Matrix, loss: Loss) -> Result<f64> {
    check_dims(x, x2, pi_v, Side::SampleSide)?;
    let m = contract(x, x2, pi_s, loss, Side::FeatureSide)?;
    m.matrix.dot(pi_v)
}
