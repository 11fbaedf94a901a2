//! Refinement studies on the manufactured solution.

use std::fmt::Write as _;

use super::diagnostics::{constraint_residual, energy_identity};
use super::example1::{self, ManufacturedSolution};
use super::norms::{rates, scalar_l2, vector_h1, vector_l2, TimeNorm};
use crate::error::Result;
use crate::solver::{Discretization, Field, TimeGrid};

/// Column names of the error table.
pub const NORM_NAMES: [&str; 5] = ["e_uf_H1", "e_pf_L2", "e_up_L2", "e_pp_LinfL2", "e_eta_LinfH1"];

/// Relative errors and per-step diagnostics of one refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    /// Cells per side of the Biot grid.
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    /// In the order of `NORM_NAMES`.
    pub errors: [f64; 5],
    /// Largest interface constraint residual over all steps.
    pub constraint_residual: f64,
    /// Largest energy identity residual over all steps.
    pub energy_residual: f64,
}

/// Solves the manufactured problem on one level and measures the errors.
pub fn run_level(n: usize, matching: bool, disc: Discretization, grid: TimeGrid) -> Result<LevelResult> {
    let sim = example1::simulation(n, matching, disc, grid)?;
    let ms = ManufacturedSolution::default();
    let lay = sim.layout();
    let sp = &sim.spaces;
    let mut norms = [TimeNorm::default(); 5];
    let mut cres: f64 = 0.0;
    let mut eres: f64 = 0.0;
    sim.run(|v| {
        let (x, t, k) = (&v.state.x, v.state.t, v.state.n);
        let tau = grid.tau;
        norms[0].add_step(
            k,
            tau,
            vector_h1(
                &sp.uf,
                lay.field(x, Field::FluidVelocity),
                &|p| ms.fluid_velocity(p, t),
                &|p| ms.fluid_velocity_grad(p, t),
            ),
        );
        norms[1].add_step(k, tau, scalar_l2(&sp.pf, lay.field(x, Field::FluidPressure), &|p| ms.fluid_pressure(p, t)));
        norms[2].add_step(k, tau, vector_l2(&sp.up, lay.field(x, Field::DarcyVelocity), &|p| ms.darcy_velocity(p, t)));
        norms[3].add_step(k, tau, scalar_l2(&sp.pp, lay.field(x, Field::PorePressure), &|p| ms.pore_pressure(p, t)));
        norms[4].add_step(
            k,
            tau,
            vector_h1(
                &sp.eta,
                lay.field(x, Field::Displacement),
                &|p| ms.displacement(p, t),
                &|p| ms.displacement_grad(p, t),
            ),
        );
        if let Some(prev) = v.prev {
            cres = cres.max(constraint_residual(&sim, v.state, prev));
            eres = eres.max(energy_identity(&sim, v.state, prev).residual());
        }
        Ok(())
    })?;
    Ok(LevelResult {
        n,
        h: 1.0 / n as f64,
        dofs: lay.total(),
        errors: [
            norms[0].rel_l2(),
            norms[1].rel_l2(),
            norms[2].rel_l2(),
            norms[3].rel_linf(),
            norms[4].rel_linf(),
        ],
        constraint_residual: cres,
        energy_residual: eres,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub matching: bool,
    pub levels: Vec<LevelResult>,
}

impl ConvergenceTable {
    pub fn errors(&self, k: usize) -> Vec<f64> {
        self.levels.iter().map(|l| l.errors[k]).collect()
    }

    /// Rates of norm `k`; the first level has none.
    pub fn rates(&self, k: usize) -> Vec<Option<f64>> {
        rates(&self.errors(k))
    }

    /// Rate of norm `k` between the two finest levels.
    pub fn final_rate(&self, k: usize) -> Option<f64> {
        self.rates(k).last().copied().flatten()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h");
        for n in NORM_NAMES {
            let _ = write!(s, ", {n}, rate");
        }
        s.push('\n');
        let all: Vec<Vec<Option<f64>>> = (0..5).map(|k| self.rates(k)).collect();
        for (i, l) in self.levels.iter().enumerate() {
            let _ = write!(s, "1/{}", l.n);
            for (k, e) in l.errors.iter().enumerate() {
                let _ = write!(s, ", {e:.3e}, ");
                match all[k][i] {
                    Some(r) => {
                        let _ = write!(s, "{r:.2}");
                    }
                    None => s.push_str("--"),
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Runs every level (concurrently) and collects the table in level order.
pub fn convergence_study(
    disc: Discretization,
    levels: &[usize],
    matching: bool,
    grid: TimeGrid,
) -> Result<ConvergenceTable> {
    let results: Vec<Result<LevelResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&n| s.spawn(move || run_level(n, matching, disc, grid)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("level thread panicked")).collect()
    });
    Ok(ConvergenceTable {
        matching,
        levels: results.into_iter().collect::<Result<_>>()?,
    })
}
