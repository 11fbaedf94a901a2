//! Finite element solver for Stokes flow coupled to Biot poroelasticity
//! through a Lagrange multiplier on the fluid-structure interface.

pub mod assembly;
pub mod error;
pub mod fe;
pub mod interface;
pub mod io;
pub mod mesh;
pub mod parallel;
pub mod scenarios;
pub mod solver;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
