//! Exact computation with partial bijections, finite Boolean inverse
//! monoids, rook matrices, type monoids, invariant means, matrix towers,
//! and paradoxicality certificates over the naturals.
//!
//! Everything is exact: subsets are bitsets, measures are big rationals,
//! residue arithmetic is symbolic, and every feasibility or uniqueness
//! claim is decided rather than approximated. Start with the runnable
//! examples in `examples/` for a tour of each capability.

pub mod af_tower;
pub mod bim;
pub mod cli;
pub mod element;
pub mod error;
pub mod means;
pub mod paradox;
pub mod pbij;
pub mod rook;
pub mod typemonoid;
pub mod util;
