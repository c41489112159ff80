//! Deciding and certifying DRR/GRR detection for groups of squarefree order.
//!
//! The crate is organised bottom-up:
//!
//! - [`group`]: groups `C_t × (C_n ⋊ C_m)` of squarefree order, subgroups, quotients.
//! - [`perm`]: permutations and permutation groups (Schreier–Sims, normalizers, coset actions).
//! - [`aut`]: automorphism groups of squarefree groups and the special automorphisms
//!   that defeat wreath-type obstructions.
//! - [`cayley`]: Cayley digraphs, their automorphism groups, DRR/GRR tests and searches.
//! - [`wreath`]: the generalised wreath condition and its certificates.
//! - [`witness`]: witness connection sets for non-detecting groups.
//! - [`classify`]: the classification of detecting groups of squarefree order.
//! - [`verify`]: self-contained verification suites shared by the CLI and tests.

pub mod arith;
pub mod aut;
pub mod cayley;
pub mod certificate;
pub mod classify;
pub mod error;
pub mod group;
pub mod perm;
pub mod verify;
pub mod witness;
pub mod wreath;

pub use error::{Error, Result};
pub use group::{enumerate_groups, make_group, ElemSet, GroupElement, SquarefreeGroup, Subgroup};
pub use perm::{PermGroup, Permutation};
