pub mod chebyshev;
pub mod cli;
pub mod continuation;
pub mod error;
pub mod geometry;
pub mod julia;
pub mod pick;
pub mod regulators;

pub use error::{Error, Result};
