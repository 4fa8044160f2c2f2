pub mod cli;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod lab;
pub mod mc;
pub mod periodic;

pub use error::{Error, Result};
