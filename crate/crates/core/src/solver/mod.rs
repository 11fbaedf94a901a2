//! Monolithic block system, essential constraints, sparse direct solves and
//! time stepping.

pub mod constraints;
pub mod lu;
pub mod system;
pub mod transient;

pub use constraints::{BoundaryConditions, Constraints, FixedValue, ProblemData, SlipNode, ZeroData};
pub use lu::{sparse_lu_solve, SparseLu};
pub use system::{BlockSystem, Blocks, Discretization, Field, Layout, Spaces};
pub use transient::{Simulation, StepView, TimeGrid, TransientState};
