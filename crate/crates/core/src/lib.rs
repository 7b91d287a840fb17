//! Stability of invariant Einstein metrics on compact homogeneous spaces.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod isotropy;
pub mod lichnerowicz;
pub mod lie_core;
pub mod linalg;
pub mod stability;

pub use error::{Error, Result};
