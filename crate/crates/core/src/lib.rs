//! Steady-state Gaussian dynamics of two magnon modes coupled to a microwave
//! cavity that is driven by squeezed vacuum, together with the entanglement
//! and squeezing diagnostics computed from the covariance matrix.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod model;
pub mod steadystate;
pub mod sweep;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
