//! Mixed-norm, anisotropic Besov and Lizorkin-Triebel quasi-norms of
//! band-limited functions on a periodic box.
//!
//! Fields are trigonometric polynomials sampled on uniform grids
//! ([`grid`]). A Littlewood-Paley window stack built from the anisotropic
//! distance ([`anisotropy`], [`littlewood_paley`]) splits a field into
//! dyadic bands, from which [`space_norms`] evaluates `B` and `F` quasi-norms
//! with iterated mixed Lebesgue norms ([`mixed_norm`]). The [`verifier`]
//! samples seeded ensembles and records empirical constants for the
//! Nikol'skij-Plancherel-Polya and Sobolev-type inequalities.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anisotropy;
pub mod error;
pub mod grid;
pub mod io;
pub mod littlewood_paley;
pub mod mixed_norm;
pub mod space_norms;
pub mod verifier;

pub use anisotropy::Anisotropy;
pub use error::{Error, Result};
pub use grid::{GridSpec, SampledField};
pub use littlewood_paley::{build_family, LPFamily};
pub use mixed_norm::MixedExponents;
pub use space_norms::{SpaceFamily, SpaceParams};
