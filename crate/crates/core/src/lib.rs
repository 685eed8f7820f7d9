//! Dissipative preparation of pure Gaussian states in bosonic lattices coupled
//! to a single squeezed reservoir.
//!
//! The crate builds passive quadratic Hamiltonians whose unique steady state,
//! with the squeezed bath attached to site 0, is a prescribed pure Gaussian
//! state; it then solves the covariance dynamics and runs robustness and
//! optimization studies on those models.

pub mod cluster;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod studies;
pub mod symplectic;

pub use error::{Error, Result};
