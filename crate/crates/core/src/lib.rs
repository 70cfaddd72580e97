//! Randomized block Kaczmarz solvers with Bregman projections for sparse
//! least-squares recovery, plus problem generators and an experiment harness.

pub mod bregman;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
