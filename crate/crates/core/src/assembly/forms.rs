//! Cell and interface bilinear forms and load vectors.

use super::params::{inverse, PhysicalParams};
use crate::error::{invalid, Result};
use crate::fe::{
    default_degree, edge_reference_point, edge_rule, triangle_rule, BasisValues, ElementFamily,
    FESpace, Kind, QuadratureRule,
};
use crate::interface::InterfacePairing;
use crate::mesh::{Mesh2D, Point};
use crate::parallel::map_indexed;
use crate::sparse::{Csr, Triplets};

pub type VectorFn<'a> = &'a (dyn Fn(Point) -> [f64; 2] + Sync);
pub type ScalarFn<'a> = &'a (dyn Fn(Point) -> f64 + Sync);

fn rule_for(a: &FESpace, b: &FESpace) -> QuadratureRule {
    triangle_rule(default_degree(a.family().degree().max(b.family().degree()))).unwrap()
}

/// Cell loop for a bilinear form. `local(cell, rule, out)` fills the
/// row-major `test x trial` element matrix.
fn assemble<F>(test: &FESpace, trial: &FESpace, local: F) -> Csr
where
    F: Fn(usize, &QuadratureRule, &mut [f64]) + Sync + Send,
{
    debug_assert_eq!(test.num_cells(), trial.num_cells());
    let rule = rule_for(test, trial);
    let (nt, ns) = (test.local_dim(), trial.local_dim());
    let blocks = map_indexed(test.num_cells(), |c| {
        let mut m = vec![0.0; nt * ns];
        local(c, &rule, &mut m);
        m
    });
    let mut t = Triplets::new(test.ndofs(), trial.ndofs());
    t.entries.reserve(blocks.len() * nt * ns);
    for (c, m) in blocks.iter().enumerate() {
        let (rd, cd) = (test.cell_dofs(c), trial.cell_dofs(c));
        for i in 0..nt {
            for j in 0..ns {
                let v = m[i * ns + j];
                if v != 0.0 {
                    t.push(rd[i], cd[j], v);
                }
            }
        }
    }
    t.to_csr()
}

fn sym(g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let o = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], o], [o, g[1][1]]]
}

fn ddot(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// `(2 mu D(u), D(v))` on a vector Lagrange space.
pub fn viscous(v: &FESpace, mu: f64) -> Csr {
    assemble(v, v, |c, rule, m| {
        let g = v.geom(c);
        let mut b = BasisValues::new(v.family());
        let n = v.local_dim();
        let mut d = vec![[[0.0; 2]; 2]; n];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            for i in 0..n {
                d[i] = sym(b.vgrad[i]);
            }
            let s = w * g.det * 2.0 * mu;
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += s * ddot(d[i], d[j]);
                }
            }
        }
    })
}

/// `(mu K^-1 u, v)` on an H(div) space.
pub fn darcy(v: &FESpace, params: &PhysicalParams) -> Csr {
    assemble(v, v, |c, rule, m| {
        let g = v.geom(c);
        let ki = inverse(params.perm(c));
        let mut b = BasisValues::new(v.family());
        let n = v.local_dim();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            let s = w * g.det * params.mu;
            for j in 0..n {
                let u = b.vval[j];
                let ku = [ki[0][0] * u[0] + ki[0][1] * u[1], ki[1][0] * u[0] + ki[1][1] * u[1]];
                for i in 0..n {
                    m[i * n + j] += s * (ku[0] * b.vval[i][0] + ku[1] * b.vval[i][1]);
                }
            }
        }
    })
}

/// `(2 mu_p D(u), D(v)) + (lambda_p div u, div v)` on a vector Lagrange space.
pub fn elasticity(v: &FESpace, params: &PhysicalParams) -> Csr {
    assemble(v, v, |c, rule, m| {
        let g = v.geom(c);
        let [lam, mu] = params.lame(c);
        let mut b = BasisValues::new(v.family());
        let n = v.local_dim();
        let mut d = vec![[[0.0; 2]; 2]; n];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            for i in 0..n {
                d[i] = sym(b.vgrad[i]);
            }
            let s = w * g.det;
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += s * (2.0 * mu * ddot(d[i], d[j]) + lam * b.div[i] * b.div[j]);
                }
            }
        }
    })
}

/// `-(div v_j, w_i)`: rows follow the scalar space, columns the vector space.
pub fn divergence(v: &FESpace, w: &FESpace) -> Csr {
    assemble(w, v, |c, rule, m| {
        let g = v.geom(c);
        let mut bv = BasisValues::new(v.family());
        let mut bw = BasisValues::new(w.family());
        let (nw, nv) = (w.local_dim(), v.local_dim());
        for (p, wt) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut bv);
            w.eval(c, &g, *p, &mut bw);
            let s = wt * g.det;
            for i in 0..nw {
                for j in 0..nv {
                    m[i * nv + j] -= s * bv.div[j] * bw.val[i];
                }
            }
        }
    })
}

/// `(coef p, q)` on a scalar space.
pub fn mass(w: &FESpace, coef: f64) -> Csr {
    assemble(w, w, |c, rule, m| {
        let g = w.geom(c);
        let mut b = BasisValues::new(w.family());
        let n = w.local_dim();
        for (p, wt) in rule.points.iter().zip(&rule.weights) {
            w.eval(c, &g, *p, &mut b);
            let s = wt * g.det * coef;
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += s * b.val[i] * b.val[j];
                }
            }
        }
    })
}

/// `(u, v)` on a vector-valued space (Lagrange or H(div)).
pub fn vector_mass(v: &FESpace) -> Csr {
    assemble(v, v, |c, rule, m| {
        let g = v.geom(c);
        let mut b = BasisValues::new(v.family());
        let n = v.local_dim();
        for (p, wt) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            let s = wt * g.det;
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += s * (b.vval[i][0] * b.vval[j][0] + b.vval[i][1] * b.vval[j][1]);
                }
            }
        }
    })
}

/// `(grad u, grad v)` on a vector Lagrange space.
pub fn vector_gradient(v: &FESpace) -> Csr {
    assemble(v, v, |c, rule, m| {
        let g = v.geom(c);
        let mut b = BasisValues::new(v.family());
        let n = v.local_dim();
        for (p, wt) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            let s = wt * g.det;
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += s * ddot(b.vgrad[i], b.vgrad[j]);
                }
            }
        }
    })
}

/// `(div u, div v)` on a vector-valued space.
pub fn div_div(v: &FESpace) -> Csr {
    assemble(v, v, |c, rule, m| {
        let g = v.geom(c);
        let mut b = BasisValues::new(v.family());
        let n = v.local_dim();
        for (p, wt) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            let s = wt * g.det;
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += s * b.div[i] * b.div[j];
                }
            }
        }
    })
}

/// `L^2` mass matrix of a trace space on its edges.
pub fn trace_mass(lam: &FESpace) -> Csr {
    let mesh = lam.mesh();
    let ElementFamily::Trace(order) = lam.family() else {
        panic!("{} is not a trace family", lam.family());
    };
    let rule = edge_rule(2 * order as usize + 2).unwrap();
    let n = lam.local_dim();
    let mut t = Triplets::new(lam.ndofs(), lam.ndofs());
    let mut v = vec![0.0; n];
    for (k, &e) in lam.trace_edges().iter().enumerate() {
        let len = mesh.edge_length(e);
        let dofs = lam.cell_dofs(k);
        let mut m = vec![0.0; n * n];
        for (q, w) in rule.points.iter().zip(&rule.weights) {
            lam.eval_trace(*q, &mut v);
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += w * len * v[i] * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                t.push(dofs[i], dofs[j], m[i * n + j]);
            }
        }
    }
    t.to_csr()
}

/// Interface coupling blocks on the common refinement.
#[derive(Clone, Debug)]
pub struct InterfaceBlocks {
    /// `<gamma u_f.t, v_f.t>`
    pub bjs_ff: Csr,
    /// `<gamma xi_j.t, v_f,i.t>`, rows fluid velocity, columns displacement.
    pub bjs_fe: Csr,
    /// `<gamma eta.t, xi.t>`
    pub bjs_ee: Csr,
    /// `<v_f.n_f, mu>`, rows multiplier.
    pub b_f: Csr,
    /// `<v_p.n_p, mu>`
    pub b_p: Csr,
    /// `<xi.n_p, mu>`
    pub b_e: Csr,
}

/// BJS and multiplier blocks. `gamma = mu alpha_BJS / sqrt(t.K t)` with `K`
/// from the adjacent poroelastic cell.
pub fn interface_blocks(
    pairing: &InterfacePairing,
    vf: &FESpace,
    vp: &FESpace,
    xp: &FESpace,
    lam: &FESpace,
    params: &PhysicalParams,
) -> Result<InterfaceBlocks> {
    let fluid: &Mesh2D = vf.mesh();
    let poro: &Mesh2D = vp.mesh();
    if lam.trace_edges() != pairing.poro_edges.as_slice() {
        return Err(invalid("multiplier space must live on the paired poroelastic edges"));
    }
    let deg = 2 * vf.family().degree().max(vp.family().degree()).max(xp.family().degree()) + 2;
    let (nf, np, ne, nl) = (vf.local_dim(), vp.local_dim(), xp.local_dim(), lam.local_dim());
    let mut ff = Triplets::new(vf.ndofs(), vf.ndofs());
    let mut fe = Triplets::new(vf.ndofs(), xp.ndofs());
    let mut ee = Triplets::new(xp.ndofs(), xp.ndofs());
    let mut bf = Triplets::new(lam.ndofs(), vf.ndofs());
    let mut bp = Triplets::new(lam.ndofs(), vp.ndofs());
    let mut be = Triplets::new(lam.ndofs(), xp.ndofs());
    let mut b_f = BasisValues::new(vf.family());
    let mut b_p = BasisValues::new(vp.family());
    let mut b_e = BasisValues::new(xp.family());
    let mut mu_v = vec![0.0; nl];
    for seg in &pairing.segments {
        let gf = vf.geom(seg.fluid_cell);
        let gp = vp.geom(seg.poro_cell);
        let t = seg.tangent;
        let k = params.perm(seg.poro_cell);
        let kt = t[0] * (k[0][0] * t[0] + k[0][1] * t[1]) + t[1] * (k[1][0] * t[0] + k[1][1] * t[1]);
        let gamma = params.mu * params.alpha_bjs / kt.sqrt();
        let (df, dp, de, dl) = (
            vf.cell_dofs(seg.fluid_cell),
            vp.cell_dofs(seg.poro_cell),
            xp.cell_dofs(seg.poro_cell),
            lam.cell_dofs(seg.trace),
        );
        let mut mff = vec![0.0; nf * nf];
        let mut mfe = vec![0.0; nf * ne];
        let mut mee = vec![0.0; ne * ne];
        let mut mbf = vec![0.0; nl * nf];
        let mut mbp = vec![0.0; nl * np];
        let mut mbe = vec![0.0; nl * ne];
        for q in pairing.segment_quadrature(seg, fluid, poro, deg)? {
            vf.eval(seg.fluid_cell, &gf, q.r_fluid, &mut b_f);
            vp.eval(seg.poro_cell, &gp, q.r_poro, &mut b_p);
            xp.eval(seg.poro_cell, &gp, q.r_poro, &mut b_e);
            lam.eval_trace(q.t_poro, &mut mu_v);
            let w = q.weight;
            let dotv = |v: [f64; 2], n: [f64; 2]| v[0] * n[0] + v[1] * n[1];
            let ft: Vec<f64> = (0..nf).map(|i| dotv(b_f.vval[i], t)).collect();
            let et: Vec<f64> = (0..ne).map(|i| dotv(b_e.vval[i], t)).collect();
            for i in 0..nf {
                for j in 0..nf {
                    mff[i * nf + j] += w * gamma * ft[i] * ft[j];
                }
                for j in 0..ne {
                    mfe[i * ne + j] += w * gamma * ft[i] * et[j];
                }
            }
            for i in 0..ne {
                for j in 0..ne {
                    mee[i * ne + j] += w * gamma * et[i] * et[j];
                }
            }
            for m in 0..nl {
                for j in 0..nf {
                    mbf[m * nf + j] += w * mu_v[m] * dotv(b_f.vval[j], seg.n_fluid);
                }
                for j in 0..np {
                    mbp[m * np + j] += w * mu_v[m] * dotv(b_p.vval[j], seg.n_poro);
                }
                for j in 0..ne {
                    mbe[m * ne + j] += w * mu_v[m] * dotv(b_e.vval[j], seg.n_poro);
                }
            }
        }
        let scatter = |t: &mut Triplets, rows: &[usize], cols: &[usize], m: &[f64]| {
            let nc = cols.len();
            for (i, &r) in rows.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    if m[i * nc + j] != 0.0 {
                        t.push(r, c, m[i * nc + j]);
                    }
                }
            }
        };
        scatter(&mut ff, df, df, &mff);
        scatter(&mut fe, df, de, &mfe);
        scatter(&mut ee, de, de, &mee);
        scatter(&mut bf, dl, df, &mbf);
        scatter(&mut bp, dl, dp, &mbp);
        scatter(&mut be, dl, de, &mbe);
    }
    Ok(InterfaceBlocks {
        bjs_ff: ff.to_csr(),
        bjs_fe: fe.to_csr(),
        bjs_ee: ee.to_csr(),
        b_f: bf.to_csr(),
        b_p: bp.to_csr(),
        b_e: be.to_csr(),
    })
}

fn load_rule(v: &FESpace) -> QuadratureRule {
    triangle_rule(default_degree(v.family().degree()) + 2).unwrap()
}

fn scatter_loads(space: &FESpace, locals: Vec<Vec<f64>>) -> Vec<f64> {
    let mut out = vec![0.0; space.ndofs()];
    for (c, l) in locals.iter().enumerate() {
        for (i, &d) in space.cell_dofs(c).iter().enumerate() {
            out[d] += l[i];
        }
    }
    out
}

/// `(f, v)` on a vector-valued space.
pub fn vector_load(v: &FESpace, f: VectorFn) -> Vec<f64> {
    let rule = load_rule(v);
    let locals = map_indexed(v.num_cells(), |c| {
        let g = v.geom(c);
        let mut b = BasisValues::new(v.family());
        let mut l = vec![0.0; v.local_dim()];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            v.eval(c, &g, *p, &mut b);
            let fx = f(g.map(*p));
            for (i, li) in l.iter_mut().enumerate() {
                *li += w * g.det * (fx[0] * b.vval[i][0] + fx[1] * b.vval[i][1]);
            }
        }
        l
    });
    scatter_loads(v, locals)
}

/// `(q, w)` on a scalar space.
pub fn scalar_load(w: &FESpace, q: ScalarFn) -> Vec<f64> {
    let rule = load_rule(w);
    let locals = map_indexed(w.num_cells(), |c| {
        let g = w.geom(c);
        let mut b = BasisValues::new(w.family());
        let mut l = vec![0.0; w.local_dim()];
        for (p, wt) in rule.points.iter().zip(&rule.weights) {
            w.eval(c, &g, *p, &mut b);
            let qx = q(g.map(*p));
            for (i, li) in l.iter_mut().enumerate() {
                *li += wt * g.det * qx * b.val[i];
            }
        }
        l
    });
    scatter_loads(w, locals)
}

/// `-<v.n, p>` over the listed boundary edges of an H(div) or vector space.
pub fn normal_flux_load(v: &FESpace, edges: &[usize], p: ScalarFn) -> Vec<f64> {
    let mesh = v.mesh();
    let rule = edge_rule(2 * v.family().degree() + 4).unwrap();
    let mut out = vec![0.0; v.ndofs()];
    let mut b = BasisValues::new(v.family());
    for &e in edges {
        let c = mesh.edge_cells(e)[0].expect("boundary edge has a cell");
        let g = v.geom(c);
        let n = mesh.outward_normal(e);
        let len = mesh.edge_length(e);
        let dofs = v.cell_dofs(c);
        for (t, w) in rule.points.iter().zip(&rule.weights) {
            let r = edge_reference_point(mesh, c, e, *t);
            v.eval(c, &g, r, &mut b);
            let px = p(g.map(r));
            for (i, &d) in dofs.iter().enumerate() {
                out[d] -= w * len * px * (b.vval[i][0] * n[0] + b.vval[i][1] * n[1]);
            }
        }
    }
    out
}

/// `L^2` projection of a scalar function onto a scalar space.
pub fn l2_project(w: &FESpace, f: ScalarFn) -> Result<Vec<f64>> {
    if w.family().kind() != Kind::Scalar {
        return Err(invalid(format!("{} is not a scalar family", w.family())));
    }
    let m = mass(w, 1.0);
    let b = scalar_load(w, f);
    crate::solver::sparse_lu_solve(&m, &b)
}
