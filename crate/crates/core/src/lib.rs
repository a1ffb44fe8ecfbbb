//! Twisted-wreath coset graphs `Cos(G, P, RQ)` for the affine family
//! `P = q^2:SL(2,q)` with `T = PSL(2,q)`, and exact verification of their
//! local structure.
//!
//! The graphs have `|T|^(q^2)` vertices on one side, so nothing here stores
//! a whole graph. Vertices are canonical coset labels and the graph is
//! explored in balls of bounded radius around the two base vertices.

pub mod catalog;
pub mod error;
pub mod field;
pub mod fpmat;
pub mod graph;
pub mod module;
pub mod perm;
#[cfg(feature = "remark-asl52")]
pub mod remark;
pub mod report;
pub mod rsub;
pub mod wreath;

pub use error::{Error, Result};

/// Seed for every deterministic pseudo-random choice made during construction.
pub const CONSTRUCTION_SEED: u64 = 0x5EED;
