//! Supersymmetric separation of variables for the two-dimensional
//! generalized Morse model.

pub mod eigen;
pub mod error;
pub mod exact_solver;
pub mod field;
pub mod grid;
pub mod model2d;
pub mod operators;
pub mod oracle;
pub mod qes_solver;
pub mod quad;
pub mod special1d;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
