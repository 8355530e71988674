//! Quantum decay in a hierarchical model: a single state coupled to a
//! discrete pseudo continuum, each level of which decays into a broad real
//! continuum.
//!
//! The crate builds the reduced non-Hermitian Hamiltonian ([`model`]),
//! diagonalizes it with the bilinear biorthogonal expansion ([`spectral`]),
//! propagates the survival amplitude by three independent routes
//! ([`dynamics`]), and fits, classifies and averages the resulting decays
//! ([`analysis`]). [`export`] writes the CSV and JSON artifacts.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

// The guide's snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/regimes.md")]
    mod regimes {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
