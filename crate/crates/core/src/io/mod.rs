//! File formats: VTK fields, mesh files, configuration and run records.

pub mod config;
pub mod manifest;
pub mod vtk;
