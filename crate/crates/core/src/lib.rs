//! Dark-state polarization of a 13C nuclear spin coupled to an NV center.
//!
//! The crate builds the hyperfine and drive Hamiltonians of the electron
//! (S = 1) plus nucleus (I = 1/2) system, integrates the dephasing master
//! equation and the non-Hermitian three-level model, evaluates the
//! closed-form three-level solution, and runs the repeated polarization
//! protocol together with parameter sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod model;
pub mod output;
pub mod protocol;
pub mod spin;

pub use error::{Error, Result};
