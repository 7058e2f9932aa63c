//! Log-domain Sinkhorn scaling.

use alloc::vec;
use alloc::vec::Vec;

use crate::Matrix;
// float math lives in std; without it the methods come from libm
#[allow(unused_imports)]
use num_traits::Float;

pub(crate) struct SinkhornOutput {
    pub plan: Matrix,
    pub iterations: usize,
    pub converged: bool,
    /// L1 marginal residual after each iteration.
    pub residuals: Vec<f64>,
}

/// Numerically stable `log Σ exp(x_k)` over an iterator of exponents.
#[inline]
fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = values.map(|v| (v - max).exp()).sum();
    max + s.ln()
}

/// Plain iterations before Newton steps are tried.
const NEWTON_AFTER: usize = 100;
/// Plain iterations to wait after a rejected Newton step.
const NEWTON_COOLDOWN: usize = 20;
const LINE_SEARCH_HALVINGS: usize = 12;

struct Kernel<'a> {
    cost: &'a Matrix,
    w: &'a [f64],
    log_w: Vec<f64>,
    log_w2: Vec<f64>,
    eps: f64,
}

impl Kernel<'_> {
    fn log_entry(&self, f: &[f64], g: &[f64], i: usize, j: usize) -> f64 {
        self.log_w[i] + self.log_w2[j] + (f[i] + g[j] - self.cost[(i, j)]) / self.eps
    }

    /// Column-exact `g` for `f`.
    fn update_g(&self, f: &[f64], g: &mut [f64]) {
        for (j, gj) in g.iter_mut().enumerate() {
            let lse = log_sum_exp((0..f.len()).map(|i| self.log_w[i] + (f[i] - self.cost[(i, j)]) / self.eps));
            *gj = -self.eps * lse;
        }
    }

    /// Row-exact `f` for `g`.
    fn update_f(&self, g: &[f64], f: &mut [f64]) {
        for (i, fi) in f.iter_mut().enumerate() {
            let row = self.cost.row(i);
            let lse = log_sum_exp((0..g.len()).map(|j| self.log_w2[j] + (g[j] - row[j]) / self.eps));
            *fi = -self.eps * lse;
        }
    }

    /// One Sinkhorn iteration from `f`: the column update into `g`, the following
    /// row update into `f_next`, and the row violation between the two.
    fn advance(&self, f: &[f64], g: &mut [f64], f_next: &mut [f64]) -> f64 {
        self.update_g(f, g);
        self.update_f(g, f_next);
        (0..f.len())
            .map(|i| self.w[i] * ((f[i] - f_next[i]) / self.eps).exp_m1().abs())
            .sum()
    }

    /// Newton direction in `f` for the dual at `(f, g)`.
    ///
    /// The dual Hessian is `−(1/ε)·M` with `M = [diag r, P; Pᵀ, diag c]`; `M δ = ε ∇`
    /// is solved by Jacobi-preconditioned conjugate gradients. `M` is singular along
    /// `(1, −1)`, which the right-hand side is orthogonal to.
    fn newton_direction(&self, f: &[f64], g: &[f64], w2: &[f64]) -> Option<Vec<f64>> {
        let (n, m) = (f.len(), g.len());
        let plan = Matrix::from_fn(n, m, |i, j| self.log_entry(f, g, i, j).exp());
        let r = plan.row_sums();
        let c = plan.col_sums();
        let diag: Vec<f64> = r.iter().chain(&c).copied().collect();
        if diag.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return None;
        }
        let apply = |x: &[f64], out: &mut [f64]| {
            let (xf, xg) = x.split_at(n);
            for i in 0..n {
                out[i] = r[i] * xf[i] + plan.row(i).iter().zip(xg).map(|(p, v)| p * v).sum::<f64>();
            }
            for j in 0..m {
                out[n + j] = c[j] * xg[j] + (0..n).map(|i| plan[(i, j)] * xf[i]).sum::<f64>();
            }
        };
        let b: Vec<f64> = (0..n)
            .map(|i| self.eps * (self.w[i] - r[i]))
            .chain((0..m).map(|j| self.eps * (w2[j] - c[j])))
            .collect();
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b_norm == 0.0 || !b_norm.is_finite() {
            return None;
        }

        let size = n + m;
        let mut x = vec![0.0; size];
        let mut res = b.clone();
        let mut z: Vec<f64> = res.iter().zip(&diag).map(|(v, d)| v / d).collect();
        let mut dir = z.clone();
        let mut rz: f64 = res.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut q = vec![0.0; size];
        for _ in 0..2 * size + 20 {
            apply(&dir, &mut q);
            let curvature: f64 = dir.iter().zip(&q).map(|(a, b)| a * b).sum();
            if curvature.is_nan() || curvature <= 0.0 {
                break;
            }
            let alpha = rz / curvature;
            for k in 0..size {
                x[k] += alpha * dir[k];
                res[k] -= alpha * q[k];
            }
            if res.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-13 * b_norm {
                break;
            }
            for k in 0..size {
                z[k] = res[k] / diag[k];
            }
            let rz_next: f64 = res.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for k in 0..size {
                dir[k] = z[k] + beta * dir[k];
            }
        }
        x.truncate(n);
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

/// Plan `π_ij = exp(log w_i + log w'_j + (f_i + g_j − C_ij)/ε)`, the minimizer of
/// `⟨C,π⟩ + ε·KL(π | w w'ᵀ)` once the potentials have converged.
///
/// Each iteration sets `g` so that columns are exact, then measures the row
/// violation through the next `f` update: `Σ_i w_i |exp((f_i − f_i⁺)/ε) − 1|`.
/// Small `ε` makes plain scaling converge very slowly, so after [`NEWTON_AFTER`]
/// iterations an iteration may start from a Newton step on the dual instead of
/// the current `f`. Such a step is kept only if the residual strictly drops, so the
/// residual trace stays non-increasing.
pub(crate) fn solve(w: &[f64], w2: &[f64], cost: &Matrix, eps: f64, max_iter: usize, tol: f64) -> SinkhornOutput {
    let n = w.len();
    let m = w2.len();
    let kernel = Kernel {
        cost,
        w,
        log_w: w.iter().map(|x| x.ln()).collect(),
        log_w2: w2.iter().map(|x| x.ln()).collect(),
        eps,
    };

    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let mut f_next = vec![0.0; n];
    let mut trial_f = vec![0.0; n];
    let mut trial_g = vec![0.0; m];
    let mut trial_next = vec![0.0; n];
    let mut residuals: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut next_newton = NEWTON_AFTER;

    kernel.update_f(&g, &mut f);
    while iterations < max_iter {
        let mut residual = None;
        if iterations >= next_newton {
            let current = *residuals.last().expect("plain iterations come first");
            if let Some(step) = kernel.newton_direction(&f, &g, w2) {
                let mut t = 1.0;
                for _ in 0..LINE_SEARCH_HALVINGS {
                    for i in 0..n {
                        trial_f[i] = f[i] + t * step[i];
                    }
                    let r = kernel.advance(&trial_f, &mut trial_g, &mut trial_next);
                    if r < current {
                        core::mem::swap(&mut f, &mut trial_f);
                        core::mem::swap(&mut g, &mut trial_g);
                        core::mem::swap(&mut f_next, &mut trial_next);
                        residual = Some(r);
                        break;
                    }
                    t *= 0.5;
                }
            }
            if residual.is_none() {
                next_newton = iterations + NEWTON_COOLDOWN;
            }
        }
        let residual = match residual {
            Some(r) => r,
            None => kernel.advance(&f, &mut g, &mut f_next),
        };
        iterations += 1;
        residuals.push(residual);
        if residual <= tol {
            converged = true;
            break;
        }
        core::mem::swap(&mut f, &mut f_next);
    }

    let mut plan = Matrix::zeros(n, m);
    for (i, fi) in f.iter().enumerate() {
        let row = cost.row(i);
        let out = plan.row_mut(i);
        for j in 0..m {
            out[j] = (kernel.log_w[i] + kernel.log_w2[j] + (fi + g[j] - row[j]) / eps).exp();
        }
    }
    SinkhornOutput {
        plan,
        iterations,
        converged,
        residuals,
    }
}
