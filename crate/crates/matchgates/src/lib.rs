//! Exact-arithmetic toolkit for planar matchgates and Holant problems.
//!
//! Everything is computed over the field Q(i, √2) with arbitrary-precision
//! rationals, so signature entries, ranks, Pfaffians and Holant values are
//! bit-exact. The crate covers:
//!
//! - [`scalar`]: the exact field.
//! - [`matchgate`]: plane weighted graphs with external nodes, brute-force
//!   PerfMatch, signatures, and gadget surgeries.
//! - [`fkt`]: polynomial-time PerfMatch through a Pfaffian with a
//!   certified face orientation.
//! - [`signature`]: parity and identity checks, blockwise symmetry, matrix
//!   forms and exact rank.
//! - [`holo`]: domain-[q] signatures, Equality, holographic
//!   transformations and right inverses.
//! - [`decompose`]: the product-form decomposition of blockwise symmetric
//!   gate signatures, with witness gadgets.
//! - [`holant`]: bipartite signature grids, brute-force and
//!   matching-backed evaluation, and the transformation invariance check.
//! - [`harness`]: seeded end-to-end checks driving all of the above.

pub mod bits;
pub mod decompose;
pub mod fkt;
pub mod harness;
pub mod holant;
pub mod holo;
pub mod matchgate;
pub mod matrix;
pub mod planar;
pub mod scalar;
pub mod signature;

pub use decompose::{Decomposition, RankClass, Validation};
pub use harness::{GateGen, HarnessReport};
pub use holant::{CspInstance, SignatureGrid};
pub use holo::{DomainSignature, TransformMatrix};
pub use matchgate::{compose, contract_signatures, Edge, Matchgate, PathEnd, PendantMode};
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use signature::{BlockView, BooleanSignature, MatrixForm};
