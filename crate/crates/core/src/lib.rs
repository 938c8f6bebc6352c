//! Exactly solvable two-dimensional Coulomb systems on a rectangular torus.
//!
//! The crate pairs every closed form with an independent numerical check:
//!
//! - [`qtheta`]: Jacobi theta functions, `eta_q`, and `f_N`.
//! - [`identities`]: theta-Vandermonde and Frobenius determinant identities.
//! - [`coulomb`]: doubly periodic Green's functions and the plasma Boltzmann weight.
//! - [`landau`]: lowest-Landau-level states on the torus and their Slater determinant.
//! - [`ocp`]: the exactly solvable one-component plasma at coupling 2.
//! - [`tcg`]: the two-component Coulomb gas grand partition function.
//! - [`universality`]: the O(1) finite-size term and its three sources.
//! - [`acceptance`]: the end-to-end criteria, shared by the test suite and `selftest`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod coulomb;
pub mod error;
pub mod fit;
pub mod identities;
pub mod landau;
mod linalg;
pub mod ocp;
pub mod qtheta;
pub mod quadrature;
pub mod tcg;
pub mod universality;

pub use error::{Error, Result};
pub use qtheta::{Nome, SeriesPrecision};
