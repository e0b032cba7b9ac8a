//! Torsion of `H^1(G, R')` for totally ramified Galois extensions `R'/R`
//! of `R = k[[t]]`, by closed form and by brute-force cocycle algebra.

pub mod error;
pub mod ext;
pub mod cohomology;
pub mod field;
pub mod group;
pub mod job;
pub mod linalg;
pub mod sen;
pub mod series;

pub use error::{Error, Result};
