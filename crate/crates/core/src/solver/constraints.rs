//! Boundary conditions and the essential-constraint reduction `X = T x + g`.

use std::collections::BTreeMap;

use super::system::{Field, Layout, Spaces};
use crate::error::{invalid, Result};
use crate::mesh::{BoundaryTag, Mesh2D, Point};
use crate::sparse::{Csr, Triplets};

/// Data of a coupled problem. Every method defaults to zero.
pub trait ProblemData: Send + Sync {
    fn fluid_force(&self, _x: Point, _t: f64) -> [f64; 2] {
        [0.0; 2]
    }
    fn fluid_source(&self, _x: Point, _t: f64) -> f64 {
        0.0
    }
    fn solid_force(&self, _x: Point, _t: f64) -> [f64; 2] {
        [0.0; 2]
    }
    fn pore_source(&self, _x: Point, _t: f64) -> f64 {
        0.0
    }
    /// Fluid velocity on the Dirichlet part of the fluid boundary.
    fn fluid_velocity(&self, _x: Point, _t: f64) -> [f64; 2] {
        [0.0; 2]
    }
    /// Displacement on the clamped part of the poroelastic boundary.
    fn displacement(&self, _x: Point, _t: f64) -> [f64; 2] {
        [0.0; 2]
    }
    /// Pore pressure imposed weakly on the natural-pressure boundary.
    fn boundary_pressure(&self, _x: Point, _t: f64) -> f64 {
        0.0
    }
    fn initial_displacement(&self, _x: Point) -> [f64; 2] {
        [0.0; 2]
    }
    fn initial_pressure(&self, _x: Point) -> f64 {
        0.0
    }
}

/// Problem data with every function zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroData;

impl ProblemData for ZeroData {}

/// Boundary tags carrying each kind of condition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryConditions {
    /// Fluid velocity prescribed.
    pub fluid_dirichlet: Vec<BoundaryTag>,
    /// `u_p . n = 0`
    pub darcy_noflow: Vec<BoundaryTag>,
    /// Pore pressure imposed through the boundary term.
    pub darcy_pressure: Vec<BoundaryTag>,
    /// Displacement prescribed.
    pub solid_clamped: Vec<BoundaryTag>,
    /// `eta . n = 0` with zero shear traction.
    pub solid_roller: Vec<BoundaryTag>,
}

impl BoundaryConditions {
    /// Checks that every outer boundary edge receives one fluid condition and
    /// one Darcy and one displacement condition (traction-free if none).
    pub fn validate(&self, fluid: &Mesh2D, poro: &Mesh2D) -> Result<()> {
        let tags = |m: &Mesh2D| {
            let mut t: Vec<BoundaryTag> = m.boundary().iter().map(|b| b.tag).collect();
            t.sort_by_key(|t| *t as usize);
            t.dedup();
            t
        };
        for tag in tags(fluid) {
            if tag != BoundaryTag::Interface && !self.fluid_dirichlet.contains(&tag) {
                return Err(invalid(format!(
                    "fluid boundary '{tag}' has no velocity condition"
                )));
            }
        }
        for tag in tags(poro) {
            if tag == BoundaryTag::Interface {
                continue;
            }
            let d = self.darcy_noflow.contains(&tag) as u8 + self.darcy_pressure.contains(&tag) as u8;
            if d != 1 {
                return Err(invalid(format!(
                    "poroelastic boundary '{tag}' needs exactly one Darcy condition"
                )));
            }
        }
        for t in self.solid_clamped.iter().chain(&self.solid_roller) {
            if *t == BoundaryTag::Interface {
                return Err(invalid("the interface cannot carry a displacement condition"));
            }
        }
        Ok(())
    }
}

/// Source of the value of a fixed degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FixedValue {
    Zero,
    FluidVelocity { x: Point, comp: usize },
    Displacement { x: Point, comp: usize },
}

/// A boundary node of the displacement whose normal component is constrained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlipNode {
    pub dofs: [usize; 2],
    pub normal: [f64; 2],
    pub reduced: usize,
}

/// Essential constraints as `X = T x + g(t)`. Each full index maps to at
/// most one reduced index.
#[derive(Clone, Debug)]
pub struct Constraints {
    pub layout: Layout,
    map: Vec<Option<(usize, f64)>>,
    reduced_field: Vec<Field>,
    pub fixed: Vec<(usize, FixedValue)>,
    pub slip: Vec<SlipNode>,
}

/// Largest angle between adjacent roller normals still treated as one slip direction.
const CORNER_ANGLE_DEG: f64 = 30.0;

impl Constraints {
    pub fn new(spaces: &Spaces, bcs: &BoundaryConditions) -> Result<Self> {
        bcs.validate(&spaces.fluid_mesh, &spaces.poro_mesh)?;
        let layout = spaces.layout();
        let n = layout.total();
        let mut fixed: BTreeMap<usize, FixedValue> = BTreeMap::new();

        let uf_pts = spaces.uf.scalar_dof_points();
        let o_uf = layout.offset(Field::FluidVelocity);
        for &tag in &bcs.fluid_dirichlet {
            for d in spaces.uf.boundary_dofs(tag) {
                fixed.insert(o_uf + d, FixedValue::FluidVelocity { x: uf_pts[d / 2], comp: d % 2 });
            }
        }
        let o_up = layout.offset(Field::DarcyVelocity);
        for &tag in &bcs.darcy_noflow {
            for d in spaces.up.boundary_dofs(tag) {
                fixed.insert(o_up + d, FixedValue::Zero);
            }
        }
        let eta_pts = spaces.eta.scalar_dof_points();
        let o_eta = layout.offset(Field::Displacement);
        for &tag in &bcs.solid_clamped {
            for d in spaces.eta.boundary_dofs(tag) {
                fixed.insert(o_eta + d, FixedValue::Displacement { x: eta_pts[d / 2], comp: d % 2 });
            }
        }

        // roller normals per scalar displacement node
        let poro = &spaces.poro_mesh;
        let mut normals: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
        for &tag in &bcs.solid_roller {
            for e in poro.tagged_edges(tag) {
                let nrm = poro.outward_normal(e);
                let dofs = spaces.eta.edge_dofs(e);
                for pair in dofs.chunks(2) {
                    normals.entry(pair[0] / 2).or_default().push(nrm);
                }
            }
        }
        let cos_limit = CORNER_ANGLE_DEG.to_radians().cos();
        let mut slip_nodes = Vec::new();
        for (s, ns) in normals {
            let dofs = [o_eta + 2 * s, o_eta + 2 * s + 1];
            if fixed.contains_key(&dofs[0]) {
                continue;
            }
            let corner = ns.iter().any(|a| ns.iter().any(|b| a[0] * b[0] + a[1] * b[1] < cos_limit));
            if corner {
                fixed.insert(dofs[0], FixedValue::Zero);
                fixed.insert(dofs[1], FixedValue::Zero);
                continue;
            }
            let sum = ns.iter().fold([0.0, 0.0], |a, b| [a[0] + b[0], a[1] + b[1]]);
            let len = sum[0].hypot(sum[1]);
            slip_nodes.push((dofs, [sum[0] / len, sum[1] / len]));
        }

        let mut map = vec![None; n];
        let mut reduced_field = Vec::with_capacity(n);
        let mut slip = Vec::with_capacity(slip_nodes.len());
        let slip_first: BTreeMap<usize, usize> =
            slip_nodes.iter().enumerate().map(|(k, (d, _))| (d[0], k)).collect();
        let slip_second: BTreeMap<usize, usize> =
            slip_nodes.iter().enumerate().map(|(k, (d, _))| (d[1], k)).collect();
        for i in 0..n {
            if fixed.contains_key(&i) || slip_second.contains_key(&i) {
                continue;
            }
            let r = reduced_field.len();
            reduced_field.push(layout.field_of(i));
            if let Some(&k) = slip_first.get(&i) {
                let (dofs, nrm) = slip_nodes[k];
                // tangent (-n_y, n_x) spans the admissible motion
                map[dofs[0]] = Some((r, -nrm[1]));
                map[dofs[1]] = Some((r, nrm[0]));
                slip.push(SlipNode {
                    dofs,
                    normal: nrm,
                    reduced: r,
                });
            } else {
                map[i] = Some((r, 1.0));
            }
        }
        Ok(Constraints {
            layout,
            map,
            reduced_field,
            fixed: fixed.into_iter().collect(),
            slip,
        })
    }

    pub fn full_dim(&self) -> usize {
        self.map.len()
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced_field.len()
    }

    pub fn reduced_field(&self, r: usize) -> Field {
        self.reduced_field[r]
    }

    /// `g(t)`: prescribed values at fixed indices, zero elsewhere.
    pub fn boundary_values(&self, data: &dyn super::ProblemData, t: f64) -> Vec<f64> {
        let mut g = vec![0.0; self.full_dim()];
        for &(i, v) in &self.fixed {
            g[i] = match v {
                FixedValue::Zero => 0.0,
                FixedValue::FluidVelocity { x, comp } => data.fluid_velocity(x, t)[comp],
                FixedValue::Displacement { x, comp } => data.displacement(x, t)[comp],
            };
        }
        g
    }

    /// `T^T A T`, restricted to reduced indices where `keep` holds.
    pub fn reduce_matrix(&self, a: &Csr, keep: impl Fn(usize) -> bool) -> (Csr, Vec<usize>) {
        let (index, count) = self.renumber(keep);
        let mut t = Triplets::new(count, count);
        for i in 0..a.nrows {
            let Some((ri, ci)) = self.map[i] else { continue };
            let Some(r) = index[ri] else { continue };
            for (j, v) in a.row(i) {
                let Some((rj, cj)) = self.map[j] else { continue };
                if let Some(c) = index[rj] {
                    t.push(r, c, ci * cj * v);
                }
            }
        }
        let kept = (0..self.reduced_dim()).filter(|&r| index[r].is_some()).collect();
        (t.to_csr(), kept)
    }

    fn renumber(&self, keep: impl Fn(usize) -> bool) -> (Vec<Option<usize>>, usize) {
        let mut index = vec![None; self.reduced_dim()];
        let mut count = 0;
        for (r, slot) in index.iter_mut().enumerate() {
            if keep(r) {
                *slot = Some(count);
                count += 1;
            }
        }
        (index, count)
    }

    /// `T^T v`
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.reduced_dim()];
        for (i, m) in self.map.iter().enumerate() {
            if let Some((r, c)) = m {
                out[*r] += c * v[i];
            }
        }
        out
    }

    /// `T x + g`
    pub fn expand(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let mut out = g.to_vec();
        for (i, m) in self.map.iter().enumerate() {
            if let Some((r, c)) = m {
                out[i] += c * x[*r];
            }
        }
        out
    }

    /// Work of a full-space residual at the constrained degrees of freedom:
    /// `sum y_i r_i` over fixed indices plus `(y.n)(r.n)` over slip nodes.
    pub fn reaction_work(&self, y: &[f64], r: &[f64]) -> f64 {
        let mut w: f64 = self.fixed.iter().map(|&(i, _)| y[i] * r[i]).sum();
        for s in &self.slip {
            let [a, b] = s.dofs;
            let yn = y[a] * s.normal[0] + y[b] * s.normal[1];
            let rn = r[a] * s.normal[0] + r[b] * s.normal[1];
            w += yn * rn;
        }
        w
    }
}
