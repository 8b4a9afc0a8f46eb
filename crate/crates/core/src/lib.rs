//! Exact computer algebra for Levi-degenerate model hypersurfaces of
//! hypersurface type.
//!
//! Everything is computed over the Gaussian rationals with explicit
//! truncation orders, so every reported equality and inequality is a proved
//! statement about the stored coefficients — no floating point anywhere.

pub mod error;
pub mod lie;
pub mod linalg;
pub mod model;
pub mod normalform;
pub mod realize;
pub mod sample;
pub mod symbols;
pub mod symmetry;
pub mod par;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
