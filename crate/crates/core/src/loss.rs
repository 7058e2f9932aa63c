//! Scalar divergences `L(a, b)` compared entrywise between the two matrices.

use crate::error::domain_err;
use crate::{Matrix, Result};
// float math lives in std; without it the methods come from libm
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Loss {
    /// `(a − b)²`
    SquaredEuclidean,
    /// `|a − b|`
    Absolute,
    /// `a log(a/b) − a + b`, with `0 log 0 = 0`. Needs `a ≥ 0` and `b > 0`.
    KullbackLeibler,
}

/// Separable form `L(a,b) = f1(a) + f2(b) − h1(a)·h2(b)`.
#[derive(Clone, Copy)]
pub struct Decomposition {
    pub f1: fn(f64) -> f64,
    pub f2: fn(f64) -> f64,
    pub h1: fn(f64) -> f64,
    pub h2: fn(f64) -> f64,
}

impl core::fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Decomposition { .. }")
    }
}

fn square(a: f64) -> f64 {
    a * a
}

fn ident(a: f64) -> f64 {
    a
}

fn twice(b: f64) -> f64 {
    2.0 * b
}

fn xlogx_minus_x(a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * a.ln() - a
    }
}

fn ln(b: f64) -> f64 {
    b.ln()
}

impl Loss {
    pub fn name(self) -> &'static str {
        match self {
            Loss::SquaredEuclidean => "squared-euclidean",
            Loss::Absolute => "absolute",
            Loss::KullbackLeibler => "kullback-leibler",
        }
    }

    /// Checked evaluation.
    pub fn eval(self, a: f64, b: f64) -> Result<f64> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(domain_err!("loss arguments must be finite ({a}, {b})"));
        }
        if self == Loss::KullbackLeibler && !(a >= 0.0 && b > 0.0) {
            return Err(domain_err!("KL needs a >= 0 and b > 0, got ({a}, {b})"));
        }
        Ok(self.eval_unchecked(a, b))
    }

    /// Evaluation without domain checks, for inner loops over pre-validated data.
    #[inline]
    pub fn eval_unchecked(self, a: f64, b: f64) -> f64 {
        match self {
            Loss::SquaredEuclidean => (a - b) * (a - b),
            Loss::Absolute => (a - b).abs(),
            Loss::KullbackLeibler if a == 0.0 => b,
            Loss::KullbackLeibler => (a * (a / b).ln() - a + b).max(0.0),
        }
    }

    pub fn decomposition(self) -> Option<Decomposition> {
        match self {
            Loss::SquaredEuclidean => Some(Decomposition {
                f1: square,
                f2: square,
                h1: ident,
                h2: twice,
            }),
            Loss::KullbackLeibler => Some(Decomposition {
                f1: xlogx_minus_x,
                f2: ident,
                h1: ident,
                h2: ln,
            }),
            Loss::Absolute => None,
        }
    }

    /// Verifies that every `(X_ik, X'_jl)` pair lies in the loss domain.
    pub fn check_domain(self, x: &Matrix, x2: &Matrix) -> Result<()> {
        if self == Loss::KullbackLeibler {
            if x.as_slice().iter().any(|&a| a < 0.0) {
                return Err(domain_err!("KL loss needs a nonnegative left matrix"));
            }
            if x2.as_slice().iter().any(|&b| b <= 0.0) {
                return Err(domain_err!("KL loss needs a strictly positive right matrix"));
            }
        }
        Ok(())
    }
}

/// `loss_eval(loss, a, b)`.
pub fn loss_eval(loss: Loss, a: f64, b: f64) -> Result<f64> {
    loss.eval(a, b)
}
