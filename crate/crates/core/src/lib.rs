//! Heat-driven social cost of greenhouse gases: emissions scenarios,
//! a pseudo-surface ocean heat model, damage curves scaled onto ocean heat,
//! tail-risk bonds and discounted surfaces.

pub mod climate;
pub mod damages;
pub mod discount;
pub mod emissions;
pub mod error;
pub mod ingest;
pub(crate) mod lsq;
pub mod model;
pub mod remainder;
pub mod risk;
pub mod runner;
pub mod scenario;
pub mod stats;
pub mod surface;

pub use error::{Error, Result};
