//! Solvers for the uniform cardinality-constrained multiple knapsack problem
//! (CMK): `m` unit-capacity bins, at most `k` items per bin, maximize the total
//! value of the packed items.
//!
//! The crate contains the configuration LP with column generation, iterative
//! and one-shot randomized rounding, a constant-bins enumeration scheme with a
//! local-search baseline, the constructive linear-structure toolkit over exact
//! rationals, and exact oracles for small instances.

pub mod bench;
pub mod config_lp;
pub mod constant_bins;
pub mod error;
pub mod exact;
pub mod generate;
pub mod knapsack;
pub mod model;
pub mod rounding;
pub mod scalar;
pub mod simplex;
pub mod structure;

pub use error::{Error, Result};
pub use model::{Configuration, CoverVector, FractionalSolution, Instance, Item, ItemId, Solution};
