//! Distance-based summaries of ranked tree shapes and ranked genealogies.
//!
//! Shapes are encoded as F-matrices; the d1/d2 metrics are entrywise
//! L1/L2 distances between them (weighted by event times for genealogies).
//! On top of that the crate provides Fréchet means and variances (exact for
//! small `n`, simulated annealing beyond), Blum-François and coalescent
//! models, orders and credible balls.

pub mod error;
pub mod frechet;
pub mod io;
pub mod metrics;
pub mod models;
pub mod order;
pub mod par;
pub mod shape;

pub use error::{Error, Result};
