//! Online distributed estimation of graph-filter coefficients.
//!
//! This crate holds the numerical core: graph and shift-operator
//! construction, streaming graph-signal sources, the one-hop regressor
//! recursion, the diffusion LMS family (plain, Newton, ε-normalized and
//! preconditioned), the unsupervised clustering rule for node-varying
//! filters, and the closed-form mean and mean-square theory.
//!
//! Everything here is `no_std` with `alloc`. File formats, the Monte-Carlo
//! runner and the command line live in the `graphfilt` crate.
//!
//! Indices are 0-based throughout. Per-node vectors of length `M` are stored
//! row-major in flat `N * M` buffers, so node `k` owns `[k * M .. (k + 1) * M]`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adapt;
pub mod clustering;
pub mod error;
pub mod filter;
pub mod graph;
pub mod linalg;
pub mod regressor;
pub mod rng;
pub mod signal;
pub mod sim;
pub mod theory;

pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
