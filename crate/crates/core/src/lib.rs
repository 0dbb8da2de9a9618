//! Volume-preserving embeddings of Grassmann-manifold points under Gaussian
//! random compression.
//!
//! - [`subspace`]: volumes, principal angles and column geometry.
//! - [`measurement`]: seeded Gaussian matrices and random subspace pairs.
//! - [`theory`]: digamma, concentration centers and measurement bounds.
//! - [`experiments`]: reproducible Monte Carlo runs against the theory.
//! - [`cli`]: the `grassmann-embed` command-line driver.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod format;
pub mod matrix;
pub mod measurement;
pub mod subspace;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
