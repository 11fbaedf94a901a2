//! Spaces, assembled blocks and the `E d/dt X + H X = L` block operator.

use std::sync::Arc;

use crate::assembly::{self, InterfaceBlocks, PhysicalParams};
use crate::error::{invalid, Result};
use crate::fe::{ElementFamily, FESpace};
use crate::interface::InterfacePairing;
use crate::mesh::Mesh2D;
use crate::sparse::{Csr, Triplets};

/// The six unknown fields in block order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    FluidVelocity,
    DarcyVelocity,
    Displacement,
    FluidPressure,
    PorePressure,
    Multiplier,
}

impl Field {
    pub const ALL: [Field; 6] = [
        Field::FluidVelocity,
        Field::DarcyVelocity,
        Field::Displacement,
        Field::FluidPressure,
        Field::PorePressure,
        Field::Multiplier,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::FluidVelocity => "u_f",
            Field::DarcyVelocity => "u_p",
            Field::Displacement => "eta",
            Field::FluidPressure => "p_f",
            Field::PorePressure => "p_p",
            Field::Multiplier => "lambda",
        }
    }
}

/// Element choice for every field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Discretization {
    pub fluid_velocity: ElementFamily,
    pub fluid_pressure: ElementFamily,
    pub darcy_velocity: ElementFamily,
    pub pore_pressure: ElementFamily,
    pub displacement: ElementFamily,
    /// Polynomial order of the multiplier on each poroelastic interface edge.
    pub multiplier_order: u8,
}

impl Discretization {
    /// MINI, RT0-P0, P1 displacement, piecewise constant multiplier.
    pub fn low_order() -> Self {
        Discretization {
            fluid_velocity: ElementFamily::VecP1Bubble,
            fluid_pressure: ElementFamily::P1,
            darcy_velocity: ElementFamily::Rt0,
            pore_pressure: ElementFamily::P0,
            displacement: ElementFamily::VecP1,
            multiplier_order: 0,
        }
    }

    /// Taylor-Hood, RT1-P1dc, P2 displacement, piecewise linear multiplier.
    pub fn high_order() -> Self {
        Discretization {
            fluid_velocity: ElementFamily::VecP2,
            fluid_pressure: ElementFamily::P1,
            darcy_velocity: ElementFamily::Rt1,
            pore_pressure: ElementFamily::P1Dc,
            displacement: ElementFamily::VecP2,
            multiplier_order: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use crate::fe::Kind;
        let check = |f: ElementFamily, k: Kind, what: &str| {
            if f.kind() == k {
                Ok(())
            } else {
                Err(invalid(format!("{f} cannot be used for the {what}")))
            }
        };
        check(self.fluid_velocity, Kind::Vector, "fluid velocity")?;
        check(self.fluid_pressure, Kind::Scalar, "fluid pressure")?;
        check(self.darcy_velocity, Kind::HDiv, "Darcy velocity")?;
        check(self.pore_pressure, Kind::Scalar, "pore pressure")?;
        check(self.displacement, Kind::Vector, "displacement")?;
        if self.multiplier_order > 1 {
            return Err(invalid(format!("multiplier order {} is not supported", self.multiplier_order)));
        }
        Ok(())
    }
}

/// All finite element spaces of the coupled problem plus the interface pairing.
#[derive(Clone, Debug)]
pub struct Spaces {
    pub fluid_mesh: Arc<Mesh2D>,
    pub poro_mesh: Arc<Mesh2D>,
    pub uf: FESpace,
    pub pf: FESpace,
    pub up: FESpace,
    pub pp: FESpace,
    pub eta: FESpace,
    pub lam: FESpace,
    pub pairing: InterfacePairing,
    pub discretization: Discretization,
}

impl Spaces {
    pub fn new(fluid: Arc<Mesh2D>, poro: Arc<Mesh2D>, disc: Discretization) -> Result<Self> {
        disc.validate()?;
        let pairing = InterfacePairing::new(&fluid, &poro, None)?;
        let lam = FESpace::trace(poro.clone(), pairing.poro_edges.clone(), disc.multiplier_order)?;
        Ok(Spaces {
            uf: FESpace::new(fluid.clone(), disc.fluid_velocity)?,
            pf: FESpace::new(fluid.clone(), disc.fluid_pressure)?,
            up: FESpace::new(poro.clone(), disc.darcy_velocity)?,
            pp: FESpace::new(poro.clone(), disc.pore_pressure)?,
            eta: FESpace::new(poro.clone(), disc.displacement)?,
            lam,
            pairing,
            fluid_mesh: fluid,
            poro_mesh: poro,
            discretization: disc,
        })
    }

    pub fn space(&self, f: Field) -> &FESpace {
        match f {
            Field::FluidVelocity => &self.uf,
            Field::DarcyVelocity => &self.up,
            Field::Displacement => &self.eta,
            Field::FluidPressure => &self.pf,
            Field::PorePressure => &self.pp,
            Field::Multiplier => &self.lam,
        }
    }

    pub fn layout(&self) -> Layout {
        let mut offsets = [0; 7];
        for f in Field::ALL {
            offsets[f.index() + 1] = offsets[f.index()] + self.space(f).ndofs();
        }
        Layout { offsets }
    }
}

/// Offsets of the field blocks in the monolithic vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub offsets: [usize; 7],
}

impl Layout {
    pub fn total(&self) -> usize {
        self.offsets[6]
    }

    pub fn range(&self, f: Field) -> std::ops::Range<usize> {
        self.offsets[f.index()]..self.offsets[f.index() + 1]
    }

    pub fn len(&self, f: Field) -> usize {
        self.range(f).len()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn offset(&self, f: Field) -> usize {
        self.offsets[f.index()]
    }

    pub fn field<'a>(&self, x: &'a [f64], f: Field) -> &'a [f64] {
        &x[self.range(f)]
    }

    pub fn field_mut<'a>(&self, x: &'a mut [f64], f: Field) -> &'a mut [f64] {
        &mut x[self.range(f)]
    }

    /// Field owning a global index.
    pub fn field_of(&self, i: usize) -> Field {
        Field::ALL[(0..6).find(|&k| i < self.offsets[k + 1]).expect("index in range")]
    }
}

/// Assembled element-level operators, free of `tau` and `alpha`.
#[derive(Clone, Debug)]
pub struct Blocks {
    /// Stokes viscous form.
    pub a_f: Csr,
    /// Darcy form.
    pub a_p: Csr,
    /// Elasticity form.
    pub a_e: Csr,
    /// `-(div u_f, w_f)`
    pub b_f: Csr,
    /// `-(div u_p, w_p)`
    pub b_p: Csr,
    /// `-(div eta, w_p)`
    pub b_e: Csr,
    /// Pore pressure mass matrix.
    pub m_p: Csr,
    pub iface: InterfaceBlocks,
}

impl Blocks {
    pub fn assemble(spaces: &Spaces, params: &PhysicalParams) -> Result<Self> {
        params.validate(spaces.poro_mesh.num_cells())?;
        Ok(Blocks {
            a_f: assembly::viscous(&spaces.uf, params.mu),
            a_p: assembly::darcy(&spaces.up, params),
            a_e: assembly::elasticity(&spaces.eta, params),
            b_f: assembly::divergence(&spaces.uf, &spaces.pf),
            b_p: assembly::divergence(&spaces.up, &spaces.pp),
            b_e: assembly::divergence(&spaces.eta, &spaces.pp),
            m_p: assembly::mass(&spaces.pp, 1.0),
            iface: assembly::interface_blocks(
                &spaces.pairing,
                &spaces.uf,
                &spaces.up,
                &spaces.eta,
                &spaces.lam,
                params,
            )?,
        })
    }
}

/// Monolithic operators of the semi-discrete system `E X' + H X = L`.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub layout: Layout,
    pub e: Csr,
    pub h: Csr,
}

fn check_dims(name: &str, m: &Csr, rows: usize, cols: usize) -> Result<()> {
    if m.nrows != rows || m.ncols != cols {
        return Err(invalid(format!(
            "block {name} is {}x{}, expected {rows}x{cols}",
            m.nrows, m.ncols
        )));
    }
    Ok(())
}

impl BlockSystem {
    pub fn build(layout: Layout, blocks: &Blocks, params: &PhysicalParams) -> Result<Self> {
        use Field::*;
        let n = |f: Field| layout.len(f);
        let ib = &blocks.iface;
        check_dims("A_f", &blocks.a_f, n(FluidVelocity), n(FluidVelocity))?;
        check_dims("A_p", &blocks.a_p, n(DarcyVelocity), n(DarcyVelocity))?;
        check_dims("A_e", &blocks.a_e, n(Displacement), n(Displacement))?;
        check_dims("B_f", &blocks.b_f, n(FluidPressure), n(FluidVelocity))?;
        check_dims("B_p", &blocks.b_p, n(PorePressure), n(DarcyVelocity))?;
        check_dims("B_e", &blocks.b_e, n(PorePressure), n(Displacement))?;
        check_dims("M_p", &blocks.m_p, n(PorePressure), n(PorePressure))?;
        check_dims("BJS_ff", &ib.bjs_ff, n(FluidVelocity), n(FluidVelocity))?;
        check_dims("BJS_fe", &ib.bjs_fe, n(FluidVelocity), n(Displacement))?;
        check_dims("BJS_ee", &ib.bjs_ee, n(Displacement), n(Displacement))?;
        check_dims("B_fG", &ib.b_f, n(Multiplier), n(FluidVelocity))?;
        check_dims("B_pG", &ib.b_p, n(Multiplier), n(DarcyVelocity))?;
        check_dims("B_eG", &ib.b_e, n(Multiplier), n(Displacement))?;

        let o = |f: Field| layout.offset(f);
        let total = layout.total();
        let alpha = params.alpha;

        let mut h = Triplets::new(total, total);
        h.add_block(&blocks.a_f, o(FluidVelocity), o(FluidVelocity), 1.0);
        h.add_block(&ib.bjs_ff, o(FluidVelocity), o(FluidVelocity), 1.0);
        h.add_block_transposed(&blocks.b_f, o(FluidVelocity), o(FluidPressure), 1.0);
        h.add_block_transposed(&ib.b_f, o(FluidVelocity), o(Multiplier), 1.0);
        h.add_block(&blocks.a_p, o(DarcyVelocity), o(DarcyVelocity), 1.0);
        h.add_block_transposed(&blocks.b_p, o(DarcyVelocity), o(PorePressure), 1.0);
        h.add_block_transposed(&ib.b_p, o(DarcyVelocity), o(Multiplier), 1.0);
        h.add_block(&blocks.a_e, o(Displacement), o(Displacement), 1.0);
        h.add_block_transposed(&ib.bjs_fe, o(Displacement), o(FluidVelocity), -1.0);
        h.add_block_transposed(&blocks.b_e, o(Displacement), o(PorePressure), alpha);
        h.add_block_transposed(&ib.b_e, o(Displacement), o(Multiplier), 1.0);
        h.add_block(&blocks.b_f, o(FluidPressure), o(FluidVelocity), -1.0);
        h.add_block(&blocks.b_p, o(PorePressure), o(DarcyVelocity), -1.0);
        h.add_block(&ib.b_f, o(Multiplier), o(FluidVelocity), -1.0);
        h.add_block(&ib.b_p, o(Multiplier), o(DarcyVelocity), -1.0);

        let mut e = Triplets::new(total, total);
        e.add_block(&ib.bjs_fe, o(FluidVelocity), o(Displacement), -1.0);
        e.add_block(&ib.bjs_ee, o(Displacement), o(Displacement), 1.0);
        e.add_block(&blocks.m_p, o(PorePressure), o(PorePressure), params.s0);
        e.add_block(&blocks.b_e, o(PorePressure), o(Displacement), -alpha);
        e.add_block(&ib.b_e, o(Multiplier), o(Displacement), -1.0);

        Ok(BlockSystem {
            layout,
            e: drop_zeros(e.to_csr()),
            h: drop_zeros(h.to_csr()),
        })
    }

    /// `E / tau + H`
    pub fn step_matrix(&self, tau: f64) -> Result<Csr> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(invalid(format!("time step must be positive, got {tau}")));
        }
        Ok(self.h.add(&self.e, 1.0 / tau))
    }
}

fn drop_zeros(m: Csr) -> Csr {
    let mut t = Vec::with_capacity(m.nnz());
    for i in 0..m.nrows {
        for (j, v) in m.row(i) {
            if v != 0.0 {
                t.push((i, j, v));
            }
        }
    }
    Csr::from_triplets(m.nrows, m.ncols, &t)
}
