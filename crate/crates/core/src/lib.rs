pub mod error;
pub mod expr;
pub mod geometry;
pub mod operator;
pub mod par;
pub mod quantize;
pub mod sampling;

pub use error::{Error, Result};
