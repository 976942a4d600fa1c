//! Numerical laboratory for conformal metrics e^{2u}·g_{S²} on the 2-sphere.

pub mod error;
pub mod mobius;
pub mod sphere;

pub use error::{LabError, Result};
