//! Steady state that the discrete spaces represent exactly: fluids at rest,
//! uniform pressure and multiplier, linear displacement with stress-free
//! shear and normal stress balancing the pressure jump on the interface.

use std::sync::Arc;

use super::example1::{boundary_conditions, meshes, ManufacturedSolution};
use super::norms::{relative, scalar_l2, trace_l2, vector_h1, vector_l2, SquaredNorms};
use crate::assembly::PhysicalParams;
use crate::error::Result;
use crate::mesh::Point;
use crate::solver::{Discretization, Field, ProblemData, Simulation, Spaces, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchSolution {
    pub pressure: f64,
    /// `eta = (a x, b y)`
    pub strain: [f64; 2],
}

impl PatchSolution {
    /// Chooses `b` so that the normal stress on a horizontal interface
    /// balances `pressure` for the given parameters.
    pub fn new(params: &PhysicalParams, pressure: f64, a: f64) -> Self {
        let [lambda, mu] = params.lame(0);
        let b = ((params.alpha - 1.0) * pressure - lambda * a) / (lambda + 2.0 * mu);
        PatchSolution {
            pressure,
            strain: [a, b],
        }
    }

    pub fn displacement(&self, x: Point) -> [f64; 2] {
        [self.strain[0] * x[0], self.strain[1] * x[1]]
    }

    pub fn displacement_grad(&self) -> [[f64; 2]; 2] {
        [[self.strain[0], 0.0], [0.0, self.strain[1]]]
    }
}

impl ProblemData for PatchSolution {
    fn displacement(&self, x: Point, _t: f64) -> [f64; 2] {
        PatchSolution::displacement(self, x)
    }
    fn boundary_pressure(&self, _x: Point, _t: f64) -> f64 {
        self.pressure
    }
    fn initial_displacement(&self, x: Point) -> [f64; 2] {
        PatchSolution::displacement(self, x)
    }
    fn initial_pressure(&self, _x: Point) -> f64 {
        self.pressure
    }
}

/// Largest error of each field over all steps, relative where the exact
/// field is nonzero, in the order of [`Field::ALL`].
pub fn patch_test(n: usize, matching: bool, disc: Discretization, grid: TimeGrid) -> Result<[f64; 6]> {
    let (fluid, poro) = meshes(n, matching)?;
    let spaces = Spaces::new(Arc::new(fluid), Arc::new(poro), disc)?;
    let params = ManufacturedSolution::default().params();
    let exact = PatchSolution::new(&params, 1.0, 0.3);
    let sim = Simulation::new(spaces, params, boundary_conditions(), Arc::new(exact), grid)?;
    let lay = sim.layout();
    let sp = &sim.spaces;
    let c = exact.pressure;
    let mut worst = [0.0f64; 6];
    let rel = |s: SquaredNorms| relative(s.error.sqrt(), s.exact.sqrt());
    sim.run(|v| {
        let x = &v.state.x;
        let e = [
            rel(vector_h1(&sp.uf, lay.field(x, Field::FluidVelocity), &|_| [0.0; 2], &|_| [[0.0; 2]; 2])),
            rel(vector_l2(&sp.up, lay.field(x, Field::DarcyVelocity), &|_| [0.0; 2])),
            rel(vector_h1(
                &sp.eta,
                lay.field(x, Field::Displacement),
                &|p| exact.displacement(p),
                &|_| exact.displacement_grad(),
            )),
            rel(scalar_l2(&sp.pf, lay.field(x, Field::FluidPressure), &|_| c)),
            rel(scalar_l2(&sp.pp, lay.field(x, Field::PorePressure), &|_| c)),
            rel(trace_l2(&sp.lam, lay.field(x, Field::Multiplier), &|_| c)),
        ];
        for (w, e) in worst.iter_mut().zip(e) {
            *w = w.max(e);
        }
        Ok(())
    })?;
    Ok(worst)
}
