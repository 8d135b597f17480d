//! Generalized conjugates, proximal mappings and subdifferentials for
//! concrete coupling functions, with finite-difference and brute-force
//! verification oracles.

mod error;

pub mod config;
pub mod coupling;
pub mod derivatives;
pub mod domain;
pub mod kernels;
pub mod regularity;
pub mod report;
pub mod sample;
pub mod solver;
pub mod subdiff;
pub mod suite;
pub mod testfns;

pub use error::{Error, Result};
