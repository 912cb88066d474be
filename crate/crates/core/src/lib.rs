//! Spectral and order-theoretic analysis of matrix semigroups `e^{tA}`.
//!
//! The crate decides irreducibility of a real generator through several
//! independent criteria (digraph connectivity, block-triangular form, the
//! `|A|` power test, and brute-force ideal invariance under `A` and under
//! sampled `e^{tA}`), certifies eventual positivity with an analytic tail
//! bound, describes the peripheral spectrum and the spectral projection at
//! the spectral bound, computes the rank-one long-term limit `u ⊗ φ`, and
//! checks uniform asymptotic domination between two generators.
//!
//! Everything works on dense `d × d` matrices with the standard cone of
//! entrywise nonnegative vectors. Vectors carry the `ℓ1` norm, functionals
//! the `ℓ∞` norm, and matrices the max-row-sum norm.

pub mod asymptotics;
pub mod casestudies;
pub mod cli;
pub mod domination;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod positivity;
pub mod spectral;
pub mod structure;
pub mod tol;

mod serde_complex;

pub use error::{Error, Result};
pub use linalg::{eig, expm, resolvent, spectral_projection, Cluster, EigenData};
pub use matrix::GeneratorMatrix;
