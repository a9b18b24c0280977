//! Complex-valued word embeddings with density-matrix sentence states.
//!
//! Words are unit complex vectors over `n` latent concepts. A sentence is
//! either a superposition of its word states (pure state) or a mixture of
//! their projectors, and is classified by measuring it with a learned
//! rank-r projector. A real-valued averaging model serves as the baseline.

pub mod autodiff;
pub mod clinalg;
pub mod data;
mod error;
pub mod exec;
pub mod eval;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
