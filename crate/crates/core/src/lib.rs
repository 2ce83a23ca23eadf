//! Exact-arithmetic toolkit for incidence problems between points and
//! curves with almost two degrees of freedom: directed-point/circle
//! tangencies, anchored unit circles in space, their dualities, polynomial
//! partitioning and an incidence counting engine.

pub mod error;
pub mod kernel;

pub use error::{Error, Result};
pub mod tangency;
pub mod anchored;
pub mod dual;
pub mod engine;
pub mod generators;
pub mod partition;
pub mod verify;
pub mod scan;
