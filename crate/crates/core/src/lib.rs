//! Exact algebra for codes over finite field extensions that are stable under
//! a base-field matrix.
//!
//! The crate is organized bottom-up:
//!
//! - [`gf`]: the tower `F_p ⊆ K = F_q ⊆ L = F_{q^m}` with explicit moduli,
//!   Frobenius maps and the number-theoretic helpers used by the census.
//! - [`polyfact`]: dense univariate polynomials over any [`gf::Field`],
//!   complete factorization and cyclotomic polynomials.
//! - [`matmod`]: exact matrices, kernels, minimal/characteristic polynomials
//!   and the module decompositions (primary and cyclic) of `K^n`.
//! - [`rankmetric`]: rank supports, generalized rank weights, Galois closures
//!   and the exhaustive subspace oracle.
//! - [`mcode`]: codes stable under a base-field matrix, generator polynomials,
//!   closed-form first/last weights and the hierarchy combine formulas.
//! - [`census`]: exact-rational proportions of generator-polynomial codes with
//!   first rank weight different from 1, plus the exhaustive validator.
//!
//! The crate is `no_std` (with `alloc`); all IO, parsing and serialization
//! live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod census;
pub mod gf;
pub mod matmod;
pub mod mcode;
pub mod polyfact;
pub mod rankmetric;
pub mod rng;

pub use gf::{Field, FieldTower};
pub use matmod::Matrix;
pub use polyfact::Poly;

pub use rankmetric::LinearCode;
