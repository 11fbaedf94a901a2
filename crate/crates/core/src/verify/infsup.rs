//! Discrete inf-sup constant of the pressure and multiplier coupling, and
//! the multiplier seminorm defined through auxiliary Darcy solves.

use faer::{Mat, Side};

use crate::assembly::{self, PhysicalParams};
use crate::error::{invalid, Error, Result};
use crate::parallel::map_indexed;
use crate::solver::{BoundaryConditions, Blocks, Constraints, Field, SparseLu, Spaces};
use crate::sparse::{dot, Csr, Triplets};

/// Largest pressure-plus-multiplier dimension accepted by [`inf_sup_estimate`].
pub const MAX_DENSE: usize = 6000;

/// Mixed Darcy solve with Dirichlet data on the interface, homogeneous data
/// elsewhere and the no-flow edges of `bcs` held at zero flux.
pub struct DarcyLift {
    lu: SparseLu,
    a_p: Csr,
    b_pg: Csr,
    n_up: usize,
    noflow: Vec<bool>,
}

impl std::fmt::Debug for DarcyLift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DarcyLift").field("n_up", &self.n_up).finish()
    }
}

impl DarcyLift {
    pub fn new(spaces: &Spaces, blocks: &Blocks, bcs: &BoundaryConditions) -> Result<Self> {
        let n_up = spaces.up.ndofs();
        let n_pp = spaces.pp.ndofs();
        let mut noflow = vec![false; n_up];
        for &tag in &bcs.darcy_noflow {
            for d in spaces.up.boundary_dofs(tag) {
                noflow[d] = true;
            }
        }
        let mut t = Triplets::new(n_up + n_pp, n_up + n_pp);
        for i in 0..n_up {
            if noflow[i] {
                t.push(i, i, 1.0);
                continue;
            }
            for (j, v) in blocks.a_p.row(i) {
                if !noflow[j] {
                    t.push(i, j, v);
                }
            }
        }
        for k in 0..n_pp {
            for (j, v) in blocks.b_p.row(k) {
                if !noflow[j] {
                    t.push(n_up + k, j, v);
                    t.push(j, n_up + k, v);
                }
            }
        }
        Ok(DarcyLift {
            lu: SparseLu::factor(&t.to_csr())?,
            a_p: blocks.a_p.clone(),
            b_pg: blocks.iface.b_p.clone(),
            n_up,
            noflow,
        })
    }

    /// Darcy velocity `u*(mu)`.
    pub fn velocity(&self, mu: &[f64]) -> Result<Vec<f64>> {
        if mu.len() != self.b_pg.nrows {
            return Err(invalid(format!(
                "multiplier has length {}, expected {}",
                mu.len(),
                self.b_pg.nrows
            )));
        }
        let mut rhs = vec![0.0; self.lu.dim()];
        for (i, v) in self.b_pg.matvec_t(mu).into_iter().enumerate() {
            if !self.noflow[i] {
                rhs[i] = -v;
            }
        }
        let mut x = self.lu.solve(&rhs)?;
        x.truncate(self.n_up);
        Ok(x)
    }

    /// `|mu|_Lambda = a_p(u*(mu), u*(mu))^(1/2)`
    pub fn seminorm(&self, mu: &[f64]) -> Result<f64> {
        let u = self.velocity(mu)?;
        Ok(self.a_p.bilinear(&u, &u).max(0.0).sqrt())
    }

    /// Matrix of the seminorm in the multiplier basis.
    pub fn seminorm_matrix(&self) -> Result<Mat<f64>> {
        let n = self.b_pg.nrows;
        let cols = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                self.velocity(&e)
            })
            .collect::<Result<Vec<_>>>()?;
        let au: Vec<Vec<f64>> = cols.iter().map(|u| self.a_p.matvec(u)).collect();
        Ok(Mat::from_fn(n, n, |i, j| dot(&cols[i], &au[j])))
    }
}

/// Seminorm of one multiplier on the given problem.
pub fn multiplier_seminorm(
    spaces: &Spaces,
    params: &PhysicalParams,
    bcs: &BoundaryConditions,
    mu: &[f64],
) -> Result<f64> {
    let blocks = Blocks::assemble(spaces, params)?;
    DarcyLift::new(spaces, &blocks, bcs)?.seminorm(mu)
}

fn is_velocity(f: Field) -> bool {
    matches!(f, Field::FluidVelocity | Field::DarcyVelocity | Field::Displacement)
}

/// Smallest generalized singular value of `b + b_Gamma` with respect to the
/// `H^1 x H(div) x H^1` norm on velocities and displacement and the
/// `L^2 x L^2 x Lambda_h` norm on pressures and multiplier. Essential
/// conditions of `bcs` are imposed on the velocity side.
pub fn inf_sup_estimate(spaces: &Spaces, params: &PhysicalParams, bcs: &BoundaryConditions) -> Result<f64> {
    use Field::*;
    let blocks = Blocks::assemble(spaces, params)?;
    let cons = Constraints::new(spaces, bcs)?;
    let lay = spaces.layout();
    let o = |f: Field| lay.offset(f);
    let ib = &blocks.iface;

    let mut k = Triplets::new(lay.total(), lay.total());
    k.add_block(&assembly::vector_mass(&spaces.uf), o(FluidVelocity), o(FluidVelocity), 1.0);
    k.add_block(&assembly::vector_gradient(&spaces.uf), o(FluidVelocity), o(FluidVelocity), 1.0);
    k.add_block(&assembly::vector_mass(&spaces.up), o(DarcyVelocity), o(DarcyVelocity), 1.0);
    k.add_block(&assembly::div_div(&spaces.up), o(DarcyVelocity), o(DarcyVelocity), 1.0);
    k.add_block(&assembly::vector_mass(&spaces.eta), o(Displacement), o(Displacement), 1.0);
    k.add_block(&assembly::vector_gradient(&spaces.eta), o(Displacement), o(Displacement), 1.0);
    k.add_block(&assembly::mass(&spaces.pf, 1.0), o(FluidPressure), o(FluidPressure), 1.0);
    k.add_block(&assembly::mass(&spaces.pp, 1.0), o(PorePressure), o(PorePressure), 1.0);
    k.add_block(&assembly::trace_mass(&spaces.lam), o(Multiplier), o(Multiplier), 1.0);
    k.add_block(&blocks.b_f, o(FluidPressure), o(FluidVelocity), 1.0);
    k.add_block(&blocks.b_p, o(PorePressure), o(DarcyVelocity), 1.0);
    k.add_block(&blocks.b_e, o(PorePressure), o(Displacement), params.alpha);
    k.add_block(&ib.b_f, o(Multiplier), o(FluidVelocity), 1.0);
    k.add_block(&ib.b_p, o(Multiplier), o(DarcyVelocity), 1.0);
    k.add_block(&ib.b_e, o(Multiplier), o(Displacement), 1.0);
    let (kr, _) = cons.reduce_matrix(&k.to_csr(), |_| true);

    // local numbering of the two sides
    let mut local = vec![0usize; kr.nrows];
    let (mut nv, mut nq) = (0, 0);
    let mut lam_first = None;
    for (r, slot) in local.iter_mut().enumerate() {
        let f = cons.reduced_field(r);
        if is_velocity(f) {
            *slot = nv;
            nv += 1;
        } else {
            if f == Multiplier && lam_first.is_none() {
                lam_first = Some(nq);
            }
            *slot = nq;
            nq += 1;
        }
    }
    if nq > MAX_DENSE {
        return Err(invalid(format!(
            "{nq} pressure and multiplier unknowns exceed the dense limit {MAX_DENSE}"
        )));
    }
    let mut gv = Triplets::new(nv, nv);
    let mut b = Triplets::new(nq, nv);
    let mut gq = Mat::<f64>::zeros(nq, nq);
    for r in 0..kr.nrows {
        let vr = is_velocity(cons.reduced_field(r));
        for (c, v) in kr.row(r) {
            let vc = is_velocity(cons.reduced_field(c));
            match (vr, vc) {
                (true, true) => gv.push(local[r], local[c], v),
                (false, true) => b.push(local[r], local[c], v),
                (false, false) => gq[(local[r], local[c])] += v,
                (true, false) => {}
            }
        }
    }
    let lam0 = lam_first.ok_or_else(|| invalid("no multiplier unknowns"))?;
    let semi = DarcyLift::new(spaces, &blocks, bcs)?.seminorm_matrix()?;
    for i in 0..semi.nrows() {
        for j in 0..semi.ncols() {
            gq[(lam0 + i, lam0 + j)] += semi[(i, j)];
        }
    }

    // S = B G_V^-1 B^T
    let b = b.to_csr();
    let gv_lu = SparseLu::factor(&gv.to_csr())?;
    let solves = map_indexed(nq, |i| {
        let mut rhs = vec![0.0; nv];
        for (c, v) in b.row(i) {
            rhs[c] = v;
        }
        gv_lu.solve(&rhs)
    });
    let xs = solves.into_iter().collect::<Result<Vec<_>>>()?;
    let s = Mat::from_fn(nq, nq, |i, j| b.row(j).map(|(c, v)| v * xs[i][c]).sum::<f64>());
    let s = Mat::from_fn(nq, nq, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));

    // G_Q^-1/2 S G_Q^-1/2 through the eigen decomposition of G_Q
    let evd = gq
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("Gram matrix eigen decomposition failed: {e:?}")))?;
    let d = evd.S().column_vector();
    let u = evd.U();
    for i in 0..nq {
        if !(d[i] > 0.0) {
            return Err(invalid("pressure and multiplier Gram matrix is not positive definite"));
        }
    }
    let w = Mat::from_fn(nq, nq, |i, j| u[(i, j)] / d[j].sqrt());
    let c = w.transpose() * &s * &w;
    let c = Mat::from_fn(nq, nq, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let ev = c
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("eigenvalue computation failed: {e:?}")))?;
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(min.max(0.0).sqrt())
}
