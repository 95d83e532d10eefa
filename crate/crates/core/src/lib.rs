//! Local-hidden-variable values of bipartite Bell expressions through the
//! excess of their matrix form, with bounds, matrix families and an exact
//! tightness test for correlation inequalities.

pub mod bounds;
pub mod catalog;
pub mod constructions;
pub mod error;
pub mod format;
pub mod game;
pub mod lhv;
pub mod scalar;
pub mod tightness;

pub use error::{Error, Result};
