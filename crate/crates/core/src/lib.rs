//! Directed strongly regular graphs built on the anti-flags of finite
//! incidence structures.
//!
//! The crate is organised bottom-up:
//!
//! * [`ffield`] — table-driven arithmetic in GF(p^e).
//! * [`incidence`] — group divisible designs, affine planes, hyperplane
//!   designs, partitioned sets and 2-designs, with axiom verifiers.
//! * [`dsrg`] — anti-flag digraphs, the exact `A^2` identity check, Duval
//!   multiples, closed-form parameter families and spectra.
//! * [`iso`] — colour refinement with individualisation for small digraph
//!   isomorphism and canonical forms.
//! * [`catalog`] — enumerate, build and verify family instances up to an order.

pub mod catalog;
pub mod dsrg;
pub mod ffield;
pub mod incidence;
pub mod iso;

pub use dsrg::{
    build_antiflag_backward, build_antiflag_backward_loopy, build_antiflag_forward,
    build_partition_spiked, duval_multiple, expected_params, feasibility, spectrum, verify_dsrg,
    Digraph, DsrgError, DsrgParams, FamilySpec, Spectrum,
};
pub use ffield::{make_field, FieldError, FiniteField};
pub use incidence::{AntiFlag, IncidenceError, IncidenceStructure};

/// Default cap on the number of blocks a construction may enumerate.
pub const DEFAULT_BLOCK_BUDGET: u64 = 1_000_000;
/// Default cap on the number of search-tree nodes an isomorphism search may visit.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;
