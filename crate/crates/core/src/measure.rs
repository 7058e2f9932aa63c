//! Weight vectors on the simplex and the couplings between them.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::dim_err;
use crate::{Error, Matrix, Result};

/// Tolerance on `|Σ w − 1|` accepted by [`Histogram::new`].
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Marginal tolerance a [`Coupling`] is checked against on construction.
pub const MARGINAL_TOL: f64 = 1e-7;

/// A strictly positive probability vector.
///
/// Zero-mass atoms are rejected; drop them before building the histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram(Vec<f64>);

impl Histogram {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(dim_err!("histogram needs at least one bin"));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidHistogram(alloc::format!(
                "weight {i} is {} (must be finite and > 0)",
                weights[i]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidHistogram(alloc::format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    /// Divides positive raw weights by their sum.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidHistogram("raw weights must be finite and > 0".into()));
        }
        let total: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|w| w / total).collect())
    }

    /// Uniform weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(dim_err!("uniform histogram over zero bins"));
        }
        Ok(Self(alloc::vec![1.0 / n as f64; n]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.0.len() as f64;
        self.0.iter().all(|&w| w == u)
    }
}

impl Deref for Histogram {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `uniform_histogram(n)`: every entry equal to `1/n`.
pub fn uniform_histogram(n: usize) -> Result<Histogram> {
    Histogram::uniform(n)
}

/// A transport plan together with the marginals it is meant to satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    plan: Matrix,
    row_marginal: Histogram,
    col_marginal: Histogram,
}

impl Coupling {
    /// Checks nonnegativity and both marginals at [`MARGINAL_TOL`].
    pub fn new(plan: Matrix, row_marginal: Histogram, col_marginal: Histogram) -> Result<Self> {
        if !validate_coupling(&plan, &row_marginal, &col_marginal, MARGINAL_TOL)? {
            return Err(Error::Domain(alloc::format!(
                "plan violates its marginals (residual {:.3e})",
                marginal_residual(&plan, &row_marginal, &col_marginal)
            )));
        }
        Ok(Self {
            plan,
            row_marginal,
            col_marginal,
        })
    }

    /// For solver output whose feasibility is reported separately (e.g. a Sinkhorn
    /// run stopped by its iteration cap).
    pub(crate) fn from_solver(plan: Matrix, row_marginal: &Histogram, col_marginal: &Histogram) -> Self {
        debug_assert_eq!(plan.shape(), (row_marginal.len(), col_marginal.len()));
        Self {
            plan,
            row_marginal: row_marginal.clone(),
            col_marginal: col_marginal.clone(),
        }
    }

    /// The independent coupling `w w'ᵀ`.
    pub fn product(w: &Histogram, w2: &Histogram) -> Self {
        let plan = Matrix::from_fn(w.len(), w2.len(), |i, j| w[i] * w2[j]);
        Self::from_solver(plan, w, w2)
    }

    /// `(1/n)·P_σ` with `P_σ[i][σ(i)] = 1`.
    pub fn from_permutation(sigma: &[usize]) -> Result<Self> {
        let n = sigma.len();
        if !crate::perm::is_permutation(sigma) {
            return Err(Error::Domain("not a permutation".into()));
        }
        let u = Histogram::uniform(n)?;
        let plan = Matrix::from_fn(n, n, |i, j| if sigma[i] == j { 1.0 / n as f64 } else { 0.0 });
        Ok(Self::from_solver(plan, &u, &u))
    }

    pub fn plan(&self) -> &Matrix {
        &self.plan
    }

    pub fn into_plan(self) -> Matrix {
        self.plan
    }

    pub fn row_marginal(&self) -> &Histogram {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &Histogram {
        &self.col_marginal
    }

    pub fn transpose(&self) -> Self {
        Self {
            plan: self.plan.transpose(),
            row_marginal: self.col_marginal.clone(),
            col_marginal: self.row_marginal.clone(),
        }
    }

    /// L1 marginal violation of the stored plan.
    pub fn residual(&self) -> f64 {
        marginal_residual(&self.plan, &self.row_marginal, &self.col_marginal)
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        validate_coupling(&self.plan, &self.row_marginal, &self.col_marginal, tol).unwrap_or(false)
    }

    /// `argmax_j π_ij` for every row, ties going to the lowest index.
    pub fn row_argmax(&self) -> Vec<usize> {
        self.plan.iter_rows().map(argmax).collect()
    }
}

impl Deref for Coupling {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.plan
    }
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = j;
        }
    }
    best
}

/// `Σ_i |π1 − w|_i + Σ_j |πᵀ1 − w'|_j`.
pub fn marginal_residual(plan: &Matrix, w: &[f64], w2: &[f64]) -> f64 {
    let r: f64 = plan.row_sums().iter().zip(w).map(|(a, b)| (a - b).abs()).sum();
    let c: f64 = plan.col_sums().iter().zip(w2).map(|(a, b)| (a - b).abs()).sum();
    r + c
}

/// True iff `plan ≥ 0` and every row and column sum is within `tol` of its marginal.
pub fn validate_coupling(plan: &Matrix, w: &Histogram, w2: &Histogram, tol: f64) -> Result<bool> {
    if plan.shape() != (w.len(), w2.len()) {
        return Err(dim_err!(
            "plan is {}x{} but marginals have lengths {} and {}",
            plan.rows(),
            plan.cols(),
            w.len(),
            w2.len()
        ));
    }
    if plan.as_slice().iter().any(|&x| x < 0.0) {
        return Ok(false);
    }
    let rows_ok = plan.row_sums().iter().zip(w.iter()).all(|(a, b)| (a - b).abs() <= tol);
    let cols_ok = plan.col_sums().iter().zip(w2.iter()).all(|(a, b)| (a - b).abs() <= tol);
    Ok(rows_ok && cols_ok)
}
