//! Exact certification of Courant algebroids, Dirac structures, Dorfman
//! connections and Dirac bialgebroids over a coordinate patch, with
//! rational-function coefficients.

pub mod algebroid;
pub mod bialgebroid;
pub mod bundle;
pub mod cartan;
pub mod check;
pub mod courant;
pub mod dorfman;
pub mod error;
pub mod sampling;
pub mod scalar;
pub mod zoo;

pub use error::{Error, Result};
pub mod cli;
