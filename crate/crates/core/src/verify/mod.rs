//! Manufactured solutions, error norms, convergence studies and stability
//! diagnostics.

pub mod convergence;
pub mod diagnostics;
pub mod example1;
pub mod infsup;
pub mod norms;
pub mod patch;
pub mod stability;

pub use convergence::{convergence_study, run_level, ConvergenceTable, LevelResult, NORM_NAMES};
pub use diagnostics::{constraint_residual, energy_identity, stored_energy, EnergyBalance};
pub use example1::ManufacturedSolution;
pub use infsup::{inf_sup_estimate, multiplier_seminorm, DarcyLift};
pub use patch::{patch_test, PatchSolution};
pub use stability::{admissible_fields, energy_history, unforced_simulation};
