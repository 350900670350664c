//! Uniform low-degree graph matrices over random graphs `G(n, 1/2)`.
//!
//! A shape graph `H` with distinguished vertex lists `U`, `V` and middle
//! vertices `W` defines a matrix `R_H` whose rows and columns are indexed
//! by vertex subsets of an input graph. This crate builds those matrices,
//! evaluates closed-form bounds on their spectral norm from the separator
//! structure of `H`, and checks the bounds and the underlying counting
//! arguments with exact enumeration and seeded Monte Carlo experiments.

pub mod bounds;
pub mod catalog;
pub mod error;
pub mod gmatrix;
pub mod harness;
pub mod linalg;
pub mod moment_oracle;
pub mod oracle;
pub mod rgraph;
pub mod shape;
pub mod spectral;
pub mod witness;

pub use error::{Error, Result};
