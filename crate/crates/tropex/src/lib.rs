//! Combinatorial models of tropical expansions of toroidal embeddings.
//!
//! The library works entirely at the level of cone complexes and integer
//! lattices: it validates open subdivisions and tropical expansions, computes
//! the invariants attached to each central-fibre component (fibre fans,
//! tropical position maps, star and quotient complexes), decides the
//! toric-variety-bundle criterion, runs the piecewise-linear divisor calculus
//! that determines mixing collections, and emits Cox/GIT presentations of the
//! fibre. All arithmetic is exact.

pub mod analysis;
pub mod cli;
pub mod complex;
pub mod divisor;
pub mod error;
pub mod expansion;
pub mod git;
pub mod lattice;

pub use error::{Error, Result};
