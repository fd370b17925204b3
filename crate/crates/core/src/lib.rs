//! Canonical dual and canonical tight windows for finite discrete Gabor
//! frames on `C^L`.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything here is a pure function of its inputs; file formats and
//! the command line live in the companion `gabor-cli` crate.
//!
//! Module map:
//!
//! * [`lattice`], [`signal`], [`gabor`]: the discrete model (lattices, windows,
//!   time-frequency shifts, analysis and synthesis).
//! * [`operator`]: frame operator backends (naive, dense Walnut, Janssen) and
//!   the eigendecomposition-based functional calculus.
//! * [`zak`]: Zak transform and Zibulski-Zeevi block diagonalization.
//! * [`canonical`]: canonical dual / tight windows and backend selection.
//! * [`iterate`]: scaled Newton iteration, Sherif and Lakic inverse square
//!   roots, convergence order, bound recursions.
//! * [`diagnostics`]: numerical witnesses (tightness, minimality, Kantorovich,
//!   finite sections, two-valued Zak examples).
//! * [`verify`]: seeded verification suite driving the diagnostics.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod cg;
mod error;
mod linalg;

pub mod canonical;
pub mod diagnostics;
pub mod gabor;
pub mod iterate;
pub mod lattice;
pub mod operator;
pub mod signal;
pub mod verify;
pub mod zak;

pub use canonical::{
    canonical_dual, canonical_tight, nearest_tight_scaled, norm_identity, Backend, NormIdentity,
};
pub use error::{Error, Result};
pub use gabor::{Coefficients, GaborSystem};
pub use lattice::Lattice;
pub use operator::{FrameBounds, HermitianOperator, JanssenCoefficients};
pub use signal::Signal;
pub use zak::{ZakArray, ZzField};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;
