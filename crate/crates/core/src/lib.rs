pub mod cli;
pub mod error;
pub mod integrator;
pub mod models;
pub mod reference;
pub mod shooting;
pub mod specfun;

pub use error::{Error, Result};
