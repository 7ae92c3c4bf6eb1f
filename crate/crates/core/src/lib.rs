//! Quickest change-point detection for streams of qubit states.
//!
//! Blocks of `l` copies are measured with a Schur-sampling-then-rotated-basis
//! measurement; the classical outcomes feed a CUSUM detector. The crate also
//! provides the divergences that govern the delay/false-alarm tradeoff and a
//! seeded Monte Carlo harness to estimate both sides of it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod povm;
pub mod qmath;
pub mod schur;
pub mod sim;

pub use error::{Error, Result};
