//! Exact verification engine for the Schubert-cell combinatorics of even
//! orthogonal similitude local models.
//!
//! The crate implements, in exact integer/rational arithmetic:
//!
//! * [`weyl`] — the extended affine Weyl group of `GO_{2n}` acting on
//!   `Z^{2n}`, its Kottwitz invariant and distinguished elements;
//! * [`alcove`] — base alcove, simple reflections, length, Bruhat order,
//!   admissible sets, vertex stabilizers and canonical double cosets;
//! * [`permissible`] — faces, naive permissibility, μ-vectors, the spin
//!   parity condition, permissible subsets with their orbit classification
//!   and the rank stratification;
//! * [`lift`] — symbolic verification over `Q[s]` (`s² = π`) that every
//!   Schubert class has an explicit lift to the generic fiber;
//! * [`parahoric`] — the diagram automorphism group Ξ and parahoric
//!   conjugacy classes;
//! * [`report`] — the verification suites behind the `spinadm` command-line
//!   driver, with deterministic machine-readable records.
//!
//! Everything is checked against independent oracles where one exists
//! (breadth-first length, cover-relation Bruhat order, brute-force orbit
//! membership, matrix ranks); the suites in [`report`] bundle those checks
//! into runnable form.

#![warn(missing_docs)]
#![forbid(unsafe_code)]

pub mod alcove;
pub mod error;
pub mod lift;
pub mod parahoric;
pub mod permissible;
pub mod report;
pub mod weyl;

pub use error::{Error, Result};
