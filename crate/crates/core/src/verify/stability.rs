//! Energy decay of unforced runs.

use std::sync::Arc;

use super::diagnostics::stored_energy;
use super::example1::{boundary_conditions, meshes, ManufacturedSolution};
use crate::error::{invalid, Result};
use crate::solver::{Discretization, Field, Simulation, Spaces, TimeGrid, ZeroData};

/// Example 1 geometry and coefficients with zero loads and boundary data.
pub fn unforced_simulation(n: usize, disc: Discretization, grid: TimeGrid) -> Result<Simulation> {
    let (fluid, poro) = meshes(n, true)?;
    let spaces = Spaces::new(Arc::new(fluid), Arc::new(poro), disc)?;
    let params = ManufacturedSolution::default().params();
    Simulation::new(spaces, params, boundary_conditions(), Arc::new(ZeroData), grid)
}

/// Pore pressure and displacement from a vector of free (reduced)
/// coordinates, so that all essential conditions hold.
pub fn admissible_fields(sim: &Simulation, reduced: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = &sim.constraints;
    if reduced.len() != c.reduced_dim() {
        return Err(invalid(format!(
            "expected {} reduced values, got {}",
            c.reduced_dim(),
            reduced.len()
        )));
    }
    let x = c.expand(reduced, &vec![0.0; c.full_dim()]);
    let lay = sim.layout();
    Ok((
        lay.field(&x, Field::PorePressure).to_vec(),
        lay.field(&x, Field::Displacement).to_vec(),
    ))
}

/// Stored energy `1/2 (s0 |p_p|^2 + a_e(eta, eta))` at every step of a run
/// from the consistent state built on `(p0, eta0)`.
pub fn energy_history(sim: &Simulation, p0: &[f64], eta0: &[f64]) -> Result<Vec<f64>> {
    let start = sim.consistent_state(p0, eta0)?;
    let mut out = Vec::with_capacity(sim.grid.steps + 1);
    sim.run_from(start, |v| {
        out.push(stored_energy(sim, &v.state.x));
        Ok(())
    })?;
    Ok(out)
}
