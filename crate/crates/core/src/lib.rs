//! Simulator of a silicon-photonic two-ququart variational processor.
//!
//! The crate models the MZI meshes that prepare and measure a path-encoded
//! photon pair, the coincidence statistics of the post-selected pair state,
//! and the classical loops that run VQE for H2 and variational factoring.

// `!(x > 0.0)` style checks deliberately reject NaN; 4×4 grids read best indexed.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod cost;
pub mod counts;
pub mod error;
pub mod experiments;
pub mod mesh;
pub mod observables;
pub mod optimizers;
pub mod state;
pub mod tables;

pub use error::{Error, Result};
pub use num_complex::Complex64;
