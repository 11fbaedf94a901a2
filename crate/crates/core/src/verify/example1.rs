//! Manufactured solution on `[0,1] x [-1,1]` with the fluid on top.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::{CellField, PhysicalParams};
use crate::error::{invalid, Result};
use crate::mesh::{build_structured, BoundaryTag, Mesh2D, Point, Rect, SideTags, Subdomain};
use crate::solver::{BoundaryConditions, Discretization, ProblemData, Simulation, Spaces, TimeGrid};

pub const FINAL_TIME: f64 = 0.01;
pub const TIME_STEP: f64 = 1e-3;

/// Closed-form fields and the sources they induce. The interface conditions
/// hold exactly for unit coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedSolution {
    pub mu: f64,
    /// Scalar permeability.
    pub k: f64,
    pub lambda_p: f64,
    pub mu_p: f64,
    pub alpha: f64,
    pub s0: f64,
}

impl Default for ManufacturedSolution {
    fn default() -> Self {
        ManufacturedSolution {
            mu: 1.0,
            k: 1.0,
            lambda_p: 1.0,
            mu_p: 1.0,
            alpha: 1.0,
            s0: 1.0,
        }
    }
}

fn w(x: Point) -> [f64; 2] {
    [-3.0 * x[0] + x[1].cos(), x[1] + 1.0]
}

fn grad_w(x: Point) -> [[f64; 2]; 2] {
    [[-3.0, -x[1].sin()], [0.0, 1.0]]
}

// sin(pi x) cos(pi y / 2)
fn phi(x: Point) -> f64 {
    (PI * x[0]).sin() * (PI * x[1] / 2.0).cos()
}

fn grad_phi(x: Point) -> [f64; 2] {
    [
        PI * (PI * x[0]).cos() * (PI * x[1] / 2.0).cos(),
        -PI / 2.0 * (PI * x[0]).sin() * (PI * x[1] / 2.0).sin(),
    ]
}

impl ManufacturedSolution {
    pub fn params(&self) -> PhysicalParams {
        PhysicalParams {
            mu: self.mu,
            alpha: self.alpha,
            s0: self.s0,
            alpha_bjs: 1.0,
            permeability: CellField::Uniform([[self.k, 0.0], [0.0, self.k]]),
            lame: CellField::Uniform([self.lambda_p, self.mu_p]),
        }
    }

    pub fn fluid_velocity(&self, x: Point, t: f64) -> [f64; 2] {
        let s = PI * (PI * t).cos();
        let v = w(x);
        [s * v[0], s * v[1]]
    }

    /// `grad[r][c] = d(u_r)/dx_c`
    pub fn fluid_velocity_grad(&self, x: Point, t: f64) -> [[f64; 2]; 2] {
        let s = PI * (PI * t).cos();
        let g = grad_w(x);
        [[s * g[0][0], s * g[0][1]], [s * g[1][0], s * g[1][1]]]
    }

    pub fn fluid_pressure(&self, x: Point, t: f64) -> f64 {
        t.exp() * phi(x) + 2.0 * PI * (PI * t).cos()
    }

    pub fn pore_pressure(&self, x: Point, t: f64) -> f64 {
        t.exp() * phi(x)
    }

    /// `-K grad p_p / mu`
    pub fn darcy_velocity(&self, x: Point, t: f64) -> [f64; 2] {
        let g = grad_phi(x);
        let s = -self.k / self.mu * t.exp();
        [s * g[0], s * g[1]]
    }

    pub fn displacement(&self, x: Point, t: f64) -> [f64; 2] {
        let s = (PI * t).sin();
        let v = w(x);
        [s * v[0], s * v[1]]
    }

    pub fn displacement_grad(&self, x: Point, t: f64) -> [[f64; 2]; 2] {
        let s = (PI * t).sin();
        let g = grad_w(x);
        [[s * g[0][0], s * g[0][1]], [s * g[1][0], s * g[1][1]]]
    }

    /// Interface multiplier, the pore pressure trace.
    pub fn multiplier(&self, x: Point, t: f64) -> f64 {
        self.pore_pressure(x, t)
    }

    /// `-div(sigma_f)`
    pub fn fluid_force(&self, x: Point, t: f64) -> [f64; 2] {
        let gp = grad_phi(x);
        let e = t.exp();
        let c = PI * (PI * t).cos();
        [e * gp[0] + self.mu * c * x[1].cos(), e * gp[1]]
    }

    /// `div u_f`
    pub fn fluid_source(&self, _x: Point, t: f64) -> f64 {
        -2.0 * PI * (PI * t).cos()
    }

    /// `-div(sigma_p)`
    pub fn solid_force(&self, x: Point, t: f64) -> [f64; 2] {
        let gp = grad_phi(x);
        let e = t.exp();
        let s = (PI * t).sin();
        [
            self.mu_p * s * x[1].cos() + self.alpha * e * gp[0],
            self.alpha * e * gp[1],
        ]
    }

    /// `d/dt(s0 p_p + alpha div eta) + div u_p`
    pub fn pore_source(&self, x: Point, t: f64) -> f64 {
        let e = t.exp();
        self.s0 * e * phi(x) - 2.0 * self.alpha * PI * (PI * t).cos()
            + self.k / self.mu * 1.25 * PI * PI * e * phi(x)
    }
}

impl ProblemData for ManufacturedSolution {
    fn fluid_force(&self, x: Point, t: f64) -> [f64; 2] {
        ManufacturedSolution::fluid_force(self, x, t)
    }
    fn fluid_source(&self, x: Point, t: f64) -> f64 {
        ManufacturedSolution::fluid_source(self, x, t)
    }
    fn solid_force(&self, x: Point, t: f64) -> [f64; 2] {
        ManufacturedSolution::solid_force(self, x, t)
    }
    fn pore_source(&self, x: Point, t: f64) -> f64 {
        ManufacturedSolution::pore_source(self, x, t)
    }
    fn fluid_velocity(&self, x: Point, t: f64) -> [f64; 2] {
        ManufacturedSolution::fluid_velocity(self, x, t)
    }
    fn displacement(&self, x: Point, t: f64) -> [f64; 2] {
        ManufacturedSolution::displacement(self, x, t)
    }
    fn boundary_pressure(&self, x: Point, t: f64) -> f64 {
        self.pore_pressure(x, t)
    }
    fn initial_displacement(&self, x: Point) -> [f64; 2] {
        self.displacement(x, 0.0)
    }
    fn initial_pressure(&self, x: Point) -> f64 {
        self.pore_pressure(x, 0.0)
    }
}

/// Cells per side of the fluid grid: equal to `n_poro` on matching grids,
/// otherwise `5/8 n_poro` (rounded, at least 1).
pub fn fluid_cells(n_poro: usize, matching: bool) -> usize {
    if matching {
        n_poro
    } else {
        ((5 * n_poro) as f64 / 8.0).round().max(1.0) as usize
    }
}

/// Fluid mesh on `[0,1]^2` and poroelastic mesh on `[0,1] x [-1,0]`.
pub fn meshes(n_poro: usize, matching: bool) -> Result<(Mesh2D, Mesh2D)> {
    if n_poro == 0 {
        return Err(invalid("mesh needs at least one cell per side"));
    }
    let nf = fluid_cells(n_poro, matching);
    let fluid = build_structured(
        Rect::new(0.0, 1.0, 0.0, 1.0),
        nf,
        nf,
        Subdomain::Fluid,
        SideTags {
            bottom: BoundaryTag::Interface,
            ..SideTags::plain()
        },
    )?;
    let poro = build_structured(
        Rect::new(0.0, 1.0, -1.0, 0.0),
        n_poro,
        n_poro,
        Subdomain::Poro,
        SideTags {
            top: BoundaryTag::Interface,
            ..SideTags::plain()
        },
    )?;
    Ok((fluid, poro))
}

pub fn boundary_conditions() -> BoundaryConditions {
    use BoundaryTag::*;
    BoundaryConditions {
        fluid_dirichlet: vec![Left, Right, Top],
        darcy_noflow: vec![],
        darcy_pressure: vec![Left, Right, Bottom],
        solid_clamped: vec![Left, Right, Bottom],
        solid_roller: vec![],
    }
}

/// Assembled Example 1 problem with `n_poro` cells per side of the Biot grid.
pub fn simulation(
    n_poro: usize,
    matching: bool,
    disc: Discretization,
    grid: TimeGrid,
) -> Result<Simulation> {
    let (fluid, poro) = meshes(n_poro, matching)?;
    let spaces = Spaces::new(Arc::new(fluid), Arc::new(poro), disc)?;
    let ms = ManufacturedSolution::default();
    Simulation::new(spaces, ms.params(), boundary_conditions(), Arc::new(ms), grid)
}

pub fn default_grid() -> TimeGrid {
    TimeGrid::new(FINAL_TIME, TIME_STEP).expect("valid grid")
}
