//! Surrogate models for hard turning of AISI 52100 steel and germinal-center
//! optimization of a composite objective over cutting speed, feed and depth.

pub mod cli;
pub mod data;
pub mod error;
pub mod gco;
pub mod io;
pub mod learners;
pub mod metrics;
pub mod objective;

pub use error::{Error, Result};
