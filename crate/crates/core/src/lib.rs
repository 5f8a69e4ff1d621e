//! Firing graphs: sampling, draining and estimator extraction for latent
//! factor identification on binary measure grids.

pub mod error;
pub mod f2core;
pub mod graph;
pub mod metrics;
pub mod models;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
