//! Exact linear algebra over a [`Field`](crate::field::Field): dense
//! matrices, canonical subspaces, complements and Fitting decompositions.

mod endo;
mod matrix;
mod subspace;

pub use endo::{analyze_endo, multiplication_bound, EndoAnalysis};
pub use matrix::{Matrix, Rref, Solver};
pub use subspace::{complement_within, Complement, ComplementPolicy, Subspace};
