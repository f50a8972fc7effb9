pub mod approx;
pub mod cli;
pub mod error;
pub mod fmt;
pub mod harness;
pub mod lorenz;
pub mod measures;
pub mod spectral;
pub mod transitions;

pub use error::{Error, Result};
