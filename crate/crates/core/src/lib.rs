//! Exact-arithmetic computational algebra for bilinear forms on modules.
//!
//! The crate works over the rationals and over prime fields, with no floating
//! point anywhere. It provides:
//!
//! - dense exact matrices with rref / solve / kernel / inverse ([`scalars`]),
//! - finite-dimensional associative algebras given by structure constants,
//!   their anti-endomorphisms, and enumeration thereof ([`algebra`]),
//! - right modules over such algebras, hom-spaces and endomorphism algebras
//!   ([`modrep`]),
//! - "double modules" carrying two commuting module structures ([`dblmod`]),
//! - general bilinear forms with values in a double module, their adjoints and
//!   the anti-endomorphism a regular form induces on the endomorphism algebra
//!   of its base module ([`biform`]),
//! - the universal form attached to an anti-endomorphism, similarity testing,
//!   transfer along matrix extensions, and extraction of the base-ring
//!   anti-endomorphism from the universal bimodule ([`corresp`]),
//! - classification of involutions (orthogonal / symplectic / unitary) and the
//!   trichotomy for semisimple algebras whose only invariant idempotents are
//!   trivial ([`classify`]).

pub mod algebra;
pub mod biform;
pub mod classify;
pub mod corresp;
pub mod dblmod;
pub mod modrep;
pub mod scalars;

pub use scalars::{FieldSpec, Mat, Scalar};
