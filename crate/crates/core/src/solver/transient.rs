//! Backward Euler time stepping of the monolithic system.

use std::sync::Arc;

use super::constraints::{BoundaryConditions, Constraints, ProblemData};
use super::lu::SparseLu;
use super::system::{BlockSystem, Blocks, Field, Spaces};
use crate::assembly::{self, PhysicalParams};
use crate::error::{invalid, Result};
use crate::sparse::Csr;

/// Uniform time grid `t_n = n tau`, `n = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub tau: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(invalid(format!("final time must be positive, got {t_end}")));
        }
        let steps = (t_end / tau).round();
        if (steps * tau - t_end).abs() > 1e-12 * t_end.max(1.0) || steps < 1.0 {
            return Err(invalid(format!(
                "final time {t_end} is not a multiple of the time step {tau}"
            )));
        }
        Ok(TimeGrid {
            t_end,
            tau,
            steps: steps as usize,
        })
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps {
            self.t_end
        } else {
            n as f64 * self.tau
        }
    }
}

/// Coefficients of all six fields at `t_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransientState {
    pub x: Vec<f64>,
    pub n: usize,
    pub t: f64,
}

/// A step as seen by run observers; `prev` is `None` for the initial state.
#[derive(Clone, Copy, Debug)]
pub struct StepView<'a> {
    pub state: &'a TransientState,
    pub prev: Option<&'a TransientState>,
}

/// Assembled and factorized problem, ready to step.
pub struct Simulation {
    pub spaces: Spaces,
    pub params: PhysicalParams,
    pub bcs: BoundaryConditions,
    pub data: Arc<dyn ProblemData>,
    pub blocks: Blocks,
    pub system: BlockSystem,
    pub constraints: Constraints,
    pub grid: TimeGrid,
    /// `E / tau + H` on the full space.
    pub step_matrix: Csr,
    lu: SparseLu,
    pressure_edges: Vec<usize>,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("dofs", &self.system.layout.total())
            .field("reduced", &self.constraints.reduced_dim())
            .field("grid", &self.grid)
            .finish()
    }
}

impl Simulation {
    pub fn new(
        spaces: Spaces,
        params: PhysicalParams,
        bcs: BoundaryConditions,
        data: Arc<dyn ProblemData>,
        grid: TimeGrid,
    ) -> Result<Self> {
        let blocks = Blocks::assemble(&spaces, &params)?;
        let system = BlockSystem::build(spaces.layout(), &blocks, &params)?;
        let constraints = Constraints::new(&spaces, &bcs)?;
        let step_matrix = system.step_matrix(grid.tau)?;
        let (reduced, _) = constraints.reduce_matrix(&step_matrix, |_| true);
        let lu = SparseLu::factor(&reduced)?;
        let mut pressure_edges = Vec::new();
        for &tag in &bcs.darcy_pressure {
            pressure_edges.extend(spaces.poro_mesh.tagged_edges(tag));
        }
        Ok(Simulation {
            spaces,
            params,
            bcs,
            data,
            blocks,
            system,
            constraints,
            grid,
            step_matrix,
            lu,
            pressure_edges,
        })
    }

    pub fn layout(&self) -> super::system::Layout {
        self.system.layout
    }

    /// Load vector `L(t)` on the full space.
    pub fn loads(&self, t: f64) -> Vec<f64> {
        let s = &self.spaces;
        let d = self.data.as_ref();
        let layout = self.layout();
        let mut l = vec![0.0; layout.total()];
        let parts: [(Field, Vec<f64>); 5] = [
            (Field::FluidVelocity, assembly::vector_load(&s.uf, &|x| d.fluid_force(x, t))),
            (
                Field::DarcyVelocity,
                assembly::normal_flux_load(&s.up, &self.pressure_edges, &|x| d.boundary_pressure(x, t)),
            ),
            (Field::Displacement, assembly::vector_load(&s.eta, &|x| d.solid_force(x, t))),
            (Field::FluidPressure, assembly::scalar_load(&s.pf, &|x| d.fluid_source(x, t))),
            (Field::PorePressure, assembly::scalar_load(&s.pp, &|x| d.pore_source(x, t))),
        ];
        for (f, v) in parts {
            layout.field_mut(&mut l, f).copy_from_slice(&v);
        }
        l
    }

    pub fn boundary_values(&self, t: f64) -> Vec<f64> {
        self.constraints.boundary_values(self.data.as_ref(), t)
    }

    /// Initial pressure by `L^2` projection, displacement by nodal
    /// interpolation, the remaining fields from [`Simulation::consistent_state`].
    pub fn initial_state(&self) -> Result<TransientState> {
        let d = self.data.as_ref();
        let p0 = assembly::l2_project(&self.spaces.pp, &|x| d.initial_pressure(x))?;
        let e0 = self.spaces.eta.interpolate_vector(|x| d.initial_displacement(x))?;
        self.consistent_state(&p0, &e0)
    }

    /// State at `t = 0` with the given pore pressure and displacement; the
    /// velocities, fluid pressure and multiplier solve the algebraic rows
    /// with the structure velocity taken as zero.
    pub fn consistent_state(&self, p0: &[f64], eta0: &[f64]) -> Result<TransientState> {
        let layout = self.layout();
        if p0.len() != layout.len(Field::PorePressure) || eta0.len() != layout.len(Field::Displacement) {
            return Err(invalid("initial pressure or displacement has the wrong length"));
        }
        let mut base = self.boundary_values(0.0);
        layout.field_mut(&mut base, Field::PorePressure).copy_from_slice(p0);
        layout.field_mut(&mut base, Field::Displacement).copy_from_slice(eta0);

        let algebraic = |f: Field| {
            matches!(
                f,
                Field::FluidVelocity | Field::DarcyVelocity | Field::FluidPressure | Field::Multiplier
            )
        };
        let c = &self.constraints;
        let (a, kept) = c.reduce_matrix(&self.system.h, |r| algebraic(c.reduced_field(r)));
        let mut rhs = self.loads(0.0);
        let hb = self.system.h.matvec(&base);
        for (r, h) in rhs.iter_mut().zip(&hb) {
            *r -= h;
        }
        let rr = c.restrict(&rhs);
        let sub: Vec<f64> = kept.iter().map(|&r| rr[r]).collect();
        let y = SparseLu::factor(&a)?.solve(&sub)?;
        let mut xr = vec![0.0; c.reduced_dim()];
        for (k, &r) in kept.iter().enumerate() {
            xr[r] = y[k];
        }
        let mut x = c.expand(&xr, &base);
        layout.field_mut(&mut x, Field::PorePressure).copy_from_slice(p0);
        layout.field_mut(&mut x, Field::Displacement).copy_from_slice(eta0);
        Ok(TransientState { x, n: 0, t: 0.0 })
    }

    /// Right-hand side `L(t_{n+1}) + E X^n / tau` of a step.
    pub fn step_rhs(&self, prev: &[f64], t_next: f64) -> Vec<f64> {
        let mut rhs = self.loads(t_next);
        let ex = self.system.e.matvec(prev);
        let inv = 1.0 / self.grid.tau;
        for (r, e) in rhs.iter_mut().zip(&ex) {
            *r += inv * e;
        }
        rhs
    }

    /// Advances one backward Euler step.
    pub fn step(&self, state: &TransientState) -> Result<TransientState> {
        if state.x.len() != self.layout().total() {
            return Err(invalid(format!(
                "state has length {}, expected {}",
                state.x.len(),
                self.layout().total()
            )));
        }
        let n = state.n + 1;
        let t = self.grid.time(n);
        let mut rhs = self.step_rhs(&state.x, t);
        let g = self.boundary_values(t);
        let mg = self.step_matrix.matvec(&g);
        for (r, m) in rhs.iter_mut().zip(&mg) {
            *r -= m;
        }
        let y = self.lu.solve(&self.constraints.restrict(&rhs))?;
        Ok(TransientState {
            x: self.constraints.expand(&y, &g),
            n,
            t,
        })
    }

    /// Runs from the initial state to the final time, calling `observer` on
    /// the initial state and after every step. Returns the final state.
    pub fn run<F>(&self, observer: F) -> Result<TransientState>
    where
        F: FnMut(StepView<'_>) -> Result<()>,
    {
        self.run_from(self.initial_state()?, observer)
    }

    /// Like [`Simulation::run`] but starting from a given state.
    pub fn run_from<F>(&self, mut state: TransientState, mut observer: F) -> Result<TransientState>
    where
        F: FnMut(StepView<'_>) -> Result<()>,
    {
        observer(StepView { state: &state, prev: None })?;
        for _ in state.n..self.grid.steps {
            let next = self.step(&state)?;
            observer(StepView {
                state: &next,
                prev: Some(&state),
            })?;
            state = next;
        }
        Ok(state)
    }

    /// States at every `stride`-th step and the final one; `stride == 0`
    /// keeps only the final state.
    pub fn run_collect(&self, stride: usize) -> Result<Vec<TransientState>> {
        let mut out = Vec::new();
        let steps = self.grid.steps;
        let last = self.run(|v| {
            if stride > 0 && v.state.n % stride == 0 && v.state.n != steps {
                out.push(v.state.clone());
            }
            Ok(())
        })?;
        out.push(last);
        Ok(out)
    }
}
