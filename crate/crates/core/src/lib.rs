//! Co-optimal transport (COOT) between two data matrices.
//!
//! COOT couples the samples *and* the features of `X ∈ R^{n×d}` and
//! `X' ∈ R^{n'×d'}` at the same time:
//!
//! ```text
//! min_{π^s ∈ Π(w,w'), π^v ∈ Π(v,v')}  Σ_{i,j,k,l} L(X_ik, X'_jl) π^s_ij π^v_kl
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational. File
//! formats, the command line and thread pools live in the `coot-cli` crate.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`matrix`], [`measure`], [`loss`] | dense matrices, histograms, couplings, losses |
//! | [`ot`] | exact (network simplex) and log-domain Sinkhorn solvers |
//! | [`tensorcost`] | `L(X,X') ⊗ π` contractions, naive and factored |
//! | [`coot`] | block coordinate descent, restarts, bilinear-assignment oracle |
//! | [`gw`] | Gromov–Wasserstein objective and the tied-coupling DC solver |
//! | [`apps`] | co-clustering, CCE, block generator, label propagation, elections |

#![no_std]

extern crate alloc;

pub mod apps;
pub mod coot;
mod error;
pub mod gw;
pub mod loss;
pub mod matrix;
pub mod measure;
pub mod ot;
pub mod perm;
pub mod restart;
pub mod tensorcost;

pub use error::{Error, Result};
pub use loss::Loss;
pub use matrix::Matrix;
pub use measure::{Coupling, Histogram};
