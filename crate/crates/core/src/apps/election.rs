//! Isomorphism distance between ordinal elections.

use alloc::vec::Vec;

use crate::coot::{bap_oracle, solve_coot_multistart, CootProblem, CootSolution, ORACLE_MAX};
use crate::error::dim_err;
use crate::perm::is_permutation;
use crate::restart::RestartRunner;
use crate::{Loss, Matrix, Result};

/// `positions[i][k]` is the 1-based rank voter `i` gives candidate `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Election {
    positions: Matrix,
}

impl Election {
    /// Every row must be a permutation of `1..=m`.
    pub fn from_positions(positions: Matrix) -> Result<Self> {
        let m = positions.cols();
        for (i, row) in positions.iter_rows().enumerate() {
            let ranks: Vec<usize> = row
                .iter()
                .map(|&p| {
                    if p >= 1.0 && p <= m as f64 && p == (p as usize) as f64 {
                        p as usize - 1
                    } else {
                        usize::MAX
                    }
                })
                .collect();
            if !is_permutation(&ranks) {
                return Err(dim_err!("voter {i} does not rank every candidate 1..={m} exactly once"));
            }
        }
        Ok(Self { positions })
    }

    /// From preference orders: `orders[i][r]` is voter `i`'s candidate in place `r` (0-based).
    pub fn from_orders(orders: &[Vec<usize>]) -> Result<Self> {
        let m = orders.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(orders.len() * m);
        for (i, order) in orders.iter().enumerate() {
            if order.len() != m || !is_permutation(order) {
                return Err(dim_err!("order {i} is not a permutation of {m} candidates"));
            }
            let mut row = alloc::vec![0.0; m];
            for (r, &c) in order.iter().enumerate() {
                row[c] = (r + 1) as f64;
            }
            data.extend(row);
        }
        Ok(Self {
            positions: Matrix::new(orders.len(), m, data)?,
        })
    }

    pub fn voters(&self) -> usize {
        self.positions.rows()
    }

    pub fn candidates(&self) -> usize {
        self.positions.cols()
    }

    pub fn positions(&self) -> &Matrix {
        &self.positions
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectionDistance {
    /// The distance: the oracle value when it was computed, otherwise the solver value.
    pub value: f64,
    /// `n·m` times the best COOT cost found by the solver.
    pub solver_value: f64,
    /// The value was certified by enumerating voter and candidate bijections.
    pub certified: bool,
    pub solution: CootSolution,
}

/// `n·m·COOT` between the position matrices with the absolute loss and uniform weights.
pub fn election_distance<R: RestartRunner>(
    e: &Election,
    e2: &Election,
    restarts: usize,
    seed: u64,
    runner: &R,
) -> Result<ElectionDistance> {
    if e.positions.shape() != e2.positions.shape() {
        return Err(dim_err!(
            "elections have shapes {:?} and {:?}",
            e.positions.shape(),
            e2.positions.shape()
        ));
    }
    let scale = (e.voters() * e.candidates()) as f64;
    let problem = CootProblem::uniform(e.positions.clone(), e2.positions.clone(), Loss::Absolute)?;
    let best = solve_coot_multistart(&problem, restarts, seed, runner)?;
    let solver_value = scale * best.best.cost;
    let (value, certified) = if e.voters().max(e.candidates()) <= ORACLE_MAX {
        let oracle = bap_oracle(&e.positions, &e2.positions, Loss::Absolute)?;
        ((scale * oracle.cost).min(solver_value), true)
    } else {
        (solver_value, false)
    };
    Ok(ElectionDistance {
        value,
        solver_value,
        certified,
        solution: best.best,
    })
}
