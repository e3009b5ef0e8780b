//! Exact combinatorics of partitions of `{1..k, 1'..k'}` and the tracial
//! calculus built on them.
//!
//! The crate is `no_std` and needs only `alloc`. All arithmetic is exact:
//! half-integer distances are `Ratio<i64>`, coefficients are `BigRational`
//! or Laurent polynomials in `N`.

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod deterministic;
pub mod diagram;
pub mod error;
pub mod family;
pub mod free;
pub mod freeness;
pub mod npoly;
pub mod order;
pub mod partition;
pub mod poset;
pub mod spectral;
pub mod table;
pub mod transform;

pub use algebra::{gram_entry, gram_solve, gram_solve_basis, rho_matrix, PartitionVector, SparseRho};
pub use error::{Error, Result};
pub use family::{enumerate_family, enumerate_family_with, orbit_rep, EnumCaps, FamilyTag};
pub use order::{compare, splittings, OrderReport, Splitting};
pub use npoly::{NPoly, Q};
pub use partition::{canonicalize, Partition, Point, Stats};
