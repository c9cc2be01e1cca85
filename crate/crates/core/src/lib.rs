//! Numerical harmonic analysis on finite-dimensional compact quantum groups.
//!
//! The pipeline runs in stages: validate the axioms of `(A, Δ)`
//! ([`algebra`]), solve for the Haar state and build its GNS space
//! ([`haar`]), construct the right regular representation and decompose it
//! into irreducible corepresentations ([`regular`], [`corep`]), and collect
//! every residual into a report ([`report`]).

pub mod algebra;
pub mod corep;
pub mod error;
pub mod format;
pub mod groups;
pub mod haar;
pub mod linalg;
pub mod regular;
pub mod report;

pub use algebra::{validate_cqg, AlgebraElement, Functional, QuantumGroup, DEFAULT_TOL};
pub use error::{QgError, Result};
