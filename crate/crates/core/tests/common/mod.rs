//! Independent oracles shared by the oracle and acceptance test targets.
//!
//! Basis functions are recovered as explicit polynomials in reference
//! coordinates from point evaluations, then every form is integrated exactly
//! with `int_ref x^a y^b = a! b! / (a + b + 2)!`.

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_biot::assembly::{self, CellField, PhysicalParams, Tensor};
use stokes_biot::fe::{ElementFamily, FESpace, Kind};
use stokes_biot::interface::InterfacePairing;
use stokes_biot::mesh::{BoundaryEdge, BoundaryTag, Mesh2D, Point, Subdomain};
use stokes_biot::solver::SparseLu;
use stokes_biot::sparse::{Csr, Triplets};

const N: usize = 8;

fn fact(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Polynomial `sum c[a][b] x^a y^b` in reference coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Poly {
    c: [[f64; N]; N],
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: [[0.0; N]; N] }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = *self;
        for a in 0..N {
            for b in 0..N {
                r.c[a][b] += o.c[a][b];
            }
        }
        r
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut r = *self;
        r.c.iter_mut().flatten().for_each(|v| *v *= s);
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for a in 0..N {
            for b in 0..N {
                if self.c[a][b] == 0.0 {
                    continue;
                }
                for p in 0..N {
                    for q in 0..N {
                        if o.c[p][q] == 0.0 {
                            continue;
                        }
                        assert!(a + p < N && b + q < N, "product degree too high");
                        r.c[a + p][b + q] += self.c[a][b] * o.c[p][q];
                    }
                }
            }
        }
        r
    }

    fn dx(&self) -> Poly {
        let mut r = Poly::zero();
        for a in 1..N {
            for b in 0..N {
                r.c[a - 1][b] = a as f64 * self.c[a][b];
            }
        }
        r
    }

    fn dy(&self) -> Poly {
        let mut r = Poly::zero();
        for a in 0..N {
            for b in 1..N {
                r.c[a][b - 1] = b as f64 * self.c[a][b];
            }
        }
        r
    }

    pub fn eval(&self, r: Point) -> f64 {
        let mut s = 0.0;
        for a in 0..N {
            for b in 0..N {
                s += self.c[a][b] * r[0].powi(a as i32) * r[1].powi(b as i32);
            }
        }
        s
    }

    /// Integral over the reference triangle.
    pub fn ref_integral(&self) -> f64 {
        let mut s = 0.0;
        for a in 0..N {
            for b in 0..N {
                s += self.c[a][b] * fact(a) * fact(b) / fact(a + b + 2);
            }
        }
        s
    }

    /// Restriction to `r0 + s dr` as a polynomial in `s`.
    pub fn restrict(&self, r0: Point, dr: Point) -> Vec<f64> {
        let lx = vec![r0[0], dr[0]];
        let ly = vec![r0[1], dr[1]];
        let mut out = vec![0.0; 2 * N];
        let mut px = vec![1.0];
        for a in 0..N {
            let mut py = vec![1.0];
            for b in 0..N {
                if self.c[a][b] != 0.0 {
                    for (k, v) in mul1(&px, &py).iter().enumerate() {
                        out[k] += self.c[a][b] * v;
                    }
                }
                py = mul1(&py, &ly);
            }
            px = mul1(&px, &lx);
        }
        out
    }
}

pub fn mul1(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

/// `int_0^1 p(s) ds`
pub fn integrate1(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).sum()
}

/// Dense Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        assert!(a[k][k] != 0.0, "singular matrix");
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

const CUBIC: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

fn lattice() -> Vec<Point> {
    let mut p = Vec::new();
    for i in 0..=3 {
        for j in 0..=3 - i {
            p.push([i as f64 / 3.0, j as f64 / 3.0]);
        }
    }
    p
}

/// Affine data of a cell computed from its vertices.
#[derive(Clone, Copy, Debug)]
pub struct Affine {
    pub p0: Point,
    pub jac: [[f64; 2]; 2],
    pub det: f64,
}

impl Affine {
    pub fn of(mesh: &Mesh2D, cell: usize) -> Self {
        let t = mesh.triangles()[cell];
        let p: Vec<Point> = t.iter().map(|&v| mesh.nodes()[v]).collect();
        let jac = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        Affine {
            p0: p[0],
            jac,
            det: jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0],
        }
    }

    pub fn to_ref(&self, x: Point) -> Point {
        let d = [x[0] - self.p0[0], x[1] - self.p0[1]];
        let j = self.jac;
        [
            (j[1][1] * d[0] - j[0][1] * d[1]) / self.det,
            (-j[1][0] * d[0] + j[0][0] * d[1]) / self.det,
        ]
    }

    /// Physical gradient of a reference-coordinate polynomial.
    pub fn grad(&self, p: &Poly) -> [Poly; 2] {
        let j = self.jac;
        let (px, py) = (p.dx(), p.dy());
        [
            px.scale(j[1][1] / self.det).add(&py.scale(-j[1][0] / self.det)),
            px.scale(-j[0][1] / self.det).add(&py.scale(j[0][0] / self.det)),
        ]
    }

    pub fn integral(&self, p: &Poly) -> f64 {
        self.det.abs() * p.ref_integral()
    }
}

/// Basis functions of `space` on `cell` as polynomials, one per component
/// (scalar families use component 0). `misfit` collects the worst relative
/// disagreement with direct evaluation at points not used for fitting.
pub fn reconstruct(space: &FESpace, cell: usize, misfit: &mut f64) -> Vec<[Poly; 2]> {
    let fam = space.family();
    let n = fam.local_dim();
    let geom = space.geom(cell);
    let mut b = stokes_biot::fe::BasisValues::new(fam);
    let sample = |r: Point, b: &mut stokes_biot::fe::BasisValues| -> Vec<[f64; 2]> {
        space.eval(cell, &geom, r, b);
        (0..n)
            .map(|i| match fam.kind() {
                Kind::Scalar => [b.val[i], 0.0],
                _ => b.vval[i],
            })
            .collect()
    };
    let pts = lattice();
    let vals: Vec<Vec<[f64; 2]>> = pts.iter().map(|&r| sample(r, &mut b)).collect();
    let vdm: Vec<Vec<f64>> = pts
        .iter()
        .map(|r| CUBIC.iter().map(|&(a, e)| r[0].powi(a as i32) * r[1].powi(e as i32)).collect())
        .collect();
    let mut out = vec![[Poly::zero(); 2]; n];
    for i in 0..n {
        for k in 0..2 {
            let rhs: Vec<f64> = vals.iter().map(|v| v[i][k]).collect();
            let c = gauss_solve(vdm.clone(), rhs);
            for (m, &(a, e)) in CUBIC.iter().enumerate() {
                out[i][k].c[a][e] = c[m];
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let scale = vals.iter().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..6 {
        let (x, y): (f64, f64) = (rng.gen(), rng.gen());
        let r = if x + y < 1.0 { [x, y] } else { [1.0 - x, 1.0 - y] };
        let v = sample(r, &mut b);
        for i in 0..n {
            for k in 0..2 {
                *misfit = misfit.max((out[i][k].eval(r) - v[i][k]).abs() / scale);
            }
        }
    }
    out
}

fn sym_grad(aff: &Affine, v: &[Poly; 2]) -> [[Poly; 2]; 2] {
    let g0 = aff.grad(&v[0]);
    let g1 = aff.grad(&v[1]);
    let off = g0[1].add(&g1[0]).scale(0.5);
    [[g0[0], off], [off, g1[1]]]
}

fn div(aff: &Affine, v: &[Poly; 2]) -> Poly {
    aff.grad(&v[0])[0].add(&aff.grad(&v[1])[1])
}

fn dd(a: &[[Poly; 2]; 2], b: &[[Poly; 2]; 2]) -> Poly {
    let mut s = Poly::zero();
    for r in 0..2 {
        for c in 0..2 {
            s = s.add(&a[r][c].mul(&b[r][c]));
        }
    }
    s
}

fn dot_const(v: &[Poly; 2], d: Point) -> Poly {
    v[0].scale(d[0]).add(&v[1].scale(d[1]))
}

/// Dense global matrix from local matrices scattered by the given dof maps.
pub struct Dense {
    pub m: Vec<Vec<f64>>,
}

impl Dense {
    pub fn new(r: usize, c: usize) -> Self {
        Dense { m: vec![vec![0.0; c]; r] }
    }

    pub fn scatter(&mut self, rows: &[usize], cols: &[usize], local: &[Vec<f64>]) {
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                self.m[r][c] += local[i][j];
            }
        }
    }

    /// Largest entry difference relative to the largest oracle entry.
    pub fn rel_diff(&self, a: &Csr) -> f64 {
        assert_eq!((a.nrows, a.ncols), (self.m.len(), self.m[0].len()));
        let scale = self.m.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut d = 0.0f64;
        for (r, row) in self.m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                d = d.max((a.get(r, c) - v).abs());
            }
        }
        if scale == 0.0 {
            d
        } else {
            d / scale
        }
    }
}

fn local<F: Fn(usize, usize) -> f64>(n: usize, m: usize, f: F) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..m).map(|j| f(i, j)).collect()).collect()
}

fn tagged_triangle(nodes: Vec<Point>, tri: [usize; 3], tags: [BoundaryTag; 3]) -> Mesh2D {
    let boundary = vec![
        BoundaryEdge { nodes: [tri[1], tri[2]], tag: tags[0] },
        BoundaryEdge { nodes: [tri[0], tri[2]], tag: tags[1] },
        BoundaryEdge { nodes: [tri[0], tri[1]], tag: tags[2] },
    ];
    Mesh2D::new(nodes, vec![tri], vec![Subdomain::Poro], boundary).unwrap()
}

/// The reference triangle and a general affine triangle whose local vertex
/// order differs from the node numbering.
pub fn single_cells() -> Vec<(&'static str, Arc<Mesh2D>)> {
    use BoundaryTag::*;
    vec![
        (
            "reference",
            Arc::new(tagged_triangle(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [0, 1, 2], [Right, Left, Bottom])),
        ),
        (
            "affine",
            Arc::new(tagged_triangle(
                vec![[0.1, -0.2], [1.3, 0.25], [0.35, 0.9]],
                [1, 2, 0],
                [Right, Left, Bottom],
            )),
        ),
    ]
}

pub fn oracle_params() -> PhysicalParams {
    PhysicalParams {
        mu: 1.3,
        alpha: 0.9,
        s0: 0.4,
        alpha_bjs: 0.8,
        permeability: CellField::Uniform([[2.0, 0.3], [0.3, 1.0]]),
        lame: CellField::Uniform([3.0, 1.5]),
    }
}

fn inv(k: Tensor) -> Tensor {
    let d = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    [[k[1][1] / d, -k[0][1] / d], [-k[1][0] / d, k[0][0] / d]]
}

/// Relative discrepancy of every cell form on single cells, plus the worst
/// basis reconstruction misfit.
pub fn cell_form_report() -> Vec<(String, f64)> {
    use ElementFamily::*;
    let params = oracle_params();
    let [lam, mu_p] = params.lame(0);
    let ki = inv(params.perm(0));
    let mut report = Vec::new();
    let mut misfit = 0.0;
    for (name, mesh) in single_cells() {
        let aff = Affine::of(&mesh, 0);
        let space = |f| FESpace::new(mesh.clone(), f).unwrap();
        let mut fit = |s: &FESpace| reconstruct(s, 0, &mut misfit);

        for fam in [VecP1Bubble, VecP2, VecP1] {
            let v = space(fam);
            let phi = fit(&v);
            let n = phi.len();
            let d: Vec<_> = phi.iter().map(|p| sym_grad(&aff, p)).collect();
            let dv: Vec<_> = phi.iter().map(|p| div(&aff, p)).collect();
            let dofs = v.cell_dofs(0);

            let mut visc = Dense::new(v.ndofs(), v.ndofs());
            visc.scatter(dofs, dofs, &local(n, n, |i, j| 2.0 * params.mu * aff.integral(&dd(&d[i], &d[j]))));
            report.push((format!("a_f {fam} {name}"), visc.rel_diff(&assembly::viscous(&v, params.mu))));

            let mut el = Dense::new(v.ndofs(), v.ndofs());
            el.scatter(
                dofs,
                dofs,
                &local(n, n, |i, j| {
                    2.0 * mu_p * aff.integral(&dd(&d[i], &d[j])) + lam * aff.integral(&dv[i].mul(&dv[j]))
                }),
            );
            report.push((format!("a_p^e {fam} {name}"), el.rel_diff(&assembly::elasticity(&v, &params))));
        }

        for (vf, wf) in [(VecP1Bubble, P1), (VecP2, P1), (VecP1, P0), (VecP2, P1Dc), (Rt0, P0), (Rt1, P1Dc)] {
            let (v, w) = (space(vf), space(wf));
            let (phi, psi) = (fit(&v), fit(&w));
            let dv: Vec<_> = phi.iter().map(|p| div(&aff, p)).collect();
            let mut b = Dense::new(w.ndofs(), v.ndofs());
            b.scatter(
                w.cell_dofs(0),
                v.cell_dofs(0),
                &local(psi.len(), phi.len(), |i, j| -aff.integral(&dv[j].mul(&psi[i][0]))),
            );
            report.push((format!("b {vf}-{wf} {name}"), b.rel_diff(&assembly::divergence(&v, &w))));
        }

        for fam in [Rt0, Rt1] {
            let v = space(fam);
            let phi = fit(&v);
            let n = phi.len();
            let mut a = Dense::new(v.ndofs(), v.ndofs());
            a.scatter(
                v.cell_dofs(0),
                v.cell_dofs(0),
                &local(n, n, |i, j| {
                    let kj = [
                        phi[j][0].scale(ki[0][0]).add(&phi[j][1].scale(ki[0][1])),
                        phi[j][0].scale(ki[1][0]).add(&phi[j][1].scale(ki[1][1])),
                    ];
                    params.mu * aff.integral(&kj[0].mul(&phi[i][0]).add(&kj[1].mul(&phi[i][1])))
                }),
            );
            report.push((format!("a_p^d {fam} {name}"), a.rel_diff(&assembly::darcy(&v, &params))));
        }

        for fam in [P0, P1, P1Dc] {
            let w = space(fam);
            let psi = fit(&w);
            let n = psi.len();
            let mut m = Dense::new(w.ndofs(), w.ndofs());
            m.scatter(w.cell_dofs(0), w.cell_dofs(0), &local(n, n, |i, j| 0.4 * aff.integral(&psi[i][0].mul(&psi[j][0]))));
            report.push((format!("mass {fam} {name}"), m.rel_diff(&assembly::mass(&w, 0.4))));
        }
    }
    report.push(("basis reconstruction".into(), misfit));
    report
}

/// One poroelastic cell below a slanted interface, two fluid cells above it
/// whose interface node does not match any poroelastic node.
pub fn interface_meshes() -> (Arc<Mesh2D>, Arc<Mesh2D>) {
    use BoundaryTag::*;
    let (a, b) = ([0.0, 0.0], [1.0, 0.2]);
    let poro = tagged_triangle(vec![a, b, [0.4, -0.7]], [0, 2, 1], [Right, Interface, Left]);
    let m = [0.4, 0.08];
    let fluid = Mesh2D::new(
        vec![a, m, b, [0.5, 0.9]],
        vec![[0, 1, 3], [1, 2, 3]],
        vec![Subdomain::Fluid; 2],
        vec![
            BoundaryEdge { nodes: [0, 1], tag: Interface },
            BoundaryEdge { nodes: [1, 2], tag: Interface },
            BoundaryEdge { nodes: [0, 3], tag: Left },
            BoundaryEdge { nodes: [2, 3], tag: Right },
        ],
    )
    .unwrap();
    (Arc::new(fluid), Arc::new(poro))
}

/// Relative discrepancy of the BJS and multiplier blocks.
pub fn interface_report() -> Vec<(String, f64)> {
    use ElementFamily::*;
    let params = oracle_params();
    let (fluid, poro) = interface_meshes();
    let pairing = InterfacePairing::new(&fluid, &poro, None).unwrap();
    let (a, b): (Point, Point) = ([0.0, 0.0], [1.0, 0.2]);
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let tan = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
    let below = [0.4 - a[0], -0.7 - a[1]];
    let n_p = if below[0] * tan[1] - below[1] * tan[0] > 0.0 { [-tan[1], tan[0]] } else { [tan[1], -tan[0]] };
    let n_f = [-n_p[0], -n_p[1]];
    let k = params.perm(0);
    let ktt = tan[0] * (k[0][0] * tan[0] + k[0][1] * tan[1]) + tan[1] * (k[1][0] * tan[0] + k[1][1] * tan[1]);
    let gamma = params.mu * params.alpha_bjs / ktt.sqrt();

    let mut report = Vec::new();
    let mut misfit = 0.0;
    for (fam_f, fam_p, fam_e, order) in [(VecP1Bubble, Rt0, VecP1, 0u8), (VecP2, Rt1, VecP2, 1), (VecP2, Rt1, VecP1, 1)] {
        let vf = FESpace::new(fluid.clone(), fam_f).unwrap();
        let vp = FESpace::new(poro.clone(), fam_p).unwrap();
        let xp = FESpace::new(poro.clone(), fam_e).unwrap();
        let lam = FESpace::trace(poro.clone(), pairing.poro_edges.clone(), order).unwrap();
        let blocks = assembly::interface_blocks(&pairing, &vf, &vp, &xp, &lam, &params).unwrap();

        let aff_p = Affine::of(&poro, 0);
        let up = reconstruct(&vp, 0, &mut misfit);
        let ue = reconstruct(&xp, 0, &mut misfit);
        // trace basis in the edge parameter from node 0 (a) to node 1 (b)
        let nl = order as usize + 1;
        let mut tv0 = vec![0.0; nl];
        let mut tv1 = vec![0.0; nl];
        lam.eval_trace(0.0, &mut tv0);
        lam.eval_trace(1.0, &mut tv1);
        let mut tcheck = vec![0.0; nl];
        lam.eval_trace(0.37, &mut tcheck);
        for m in 0..nl {
            let lin = tv0[m] + 0.37 * (tv1[m] - tv0[m]);
            misfit = f64::max(misfit, (lin - tcheck[m]).abs());
        }

        let mut ff = Dense::new(vf.ndofs(), vf.ndofs());
        let mut fe = Dense::new(vf.ndofs(), xp.ndofs());
        let mut ee = Dense::new(xp.ndofs(), xp.ndofs());
        let mut bf = Dense::new(lam.ndofs(), vf.ndofs());
        let mut bp = Dense::new(lam.ndofs(), vp.ndofs());
        let mut be = Dense::new(lam.ndofs(), xp.ndofs());
        for fc in 0..fluid.num_cells() {
            let aff_f = Affine::of(&fluid, fc);
            let uf = reconstruct(&vf, fc, &mut misfit);
            // interface piece of this fluid cell
            let tri = fluid.triangles()[fc];
            let on: Vec<Point> = tri
                .iter()
                .map(|&v| fluid.nodes()[v])
                .filter(|p| ((p[0] - a[0]) * tan[1] - (p[1] - a[1]) * tan[0]).abs() < 1e-12)
                .collect();
            assert_eq!(on.len(), 2);
            let (p, q) = (on[0], on[1]);
            let seg = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            let along = |x: Point| ((x[0] - a[0]) * tan[0] + (x[1] - a[1]) * tan[1]) / len;
            let (tp, tq) = (along(p), along(q));
            let on_edge = |aff: &Affine, v: &Poly| {
                let r0 = aff.to_ref(p);
                let r1 = aff.to_ref(q);
                v.restrict(r0, [r1[0] - r0[0], r1[1] - r0[1]])
            };
            let mu_s: Vec<Vec<f64>> = (0..nl).map(|m| vec![tv0[m] + tp * (tv1[m] - tv0[m]), (tq - tp) * (tv1[m] - tv0[m])]).collect();
            let f_t: Vec<_> = uf.iter().map(|u| on_edge(&aff_f, &dot_const(u, tan))).collect();
            let f_n: Vec<_> = uf.iter().map(|u| on_edge(&aff_f, &dot_const(u, n_f))).collect();
            let e_t: Vec<_> = ue.iter().map(|u| on_edge(&aff_p, &dot_const(u, tan))).collect();
            let e_n: Vec<_> = ue.iter().map(|u| on_edge(&aff_p, &dot_const(u, n_p))).collect();
            let p_n: Vec<_> = up.iter().map(|u| on_edge(&aff_p, &dot_const(u, n_p))).collect();
            let int = |x: &[f64], y: &[f64]| seg * integrate1(&mul1(x, y));
            let (df, dp, de, dl) = (vf.cell_dofs(fc), vp.cell_dofs(0), xp.cell_dofs(0), lam.cell_dofs(0));
            ff.scatter(df, df, &local(uf.len(), uf.len(), |i, j| gamma * int(&f_t[i], &f_t[j])));
            fe.scatter(df, de, &local(uf.len(), ue.len(), |i, j| gamma * int(&f_t[i], &e_t[j])));
            ee.scatter(de, de, &local(ue.len(), ue.len(), |i, j| gamma * int(&e_t[i], &e_t[j])));
            bf.scatter(dl, df, &local(nl, uf.len(), |m, j| int(&mu_s[m], &f_n[j])));
            bp.scatter(dl, dp, &local(nl, up.len(), |m, j| int(&mu_s[m], &p_n[j])));
            be.scatter(dl, de, &local(nl, ue.len(), |m, j| int(&mu_s[m], &e_n[j])));
        }
        let tag = format!("{fam_f}/{fam_p}/{fam_e}/trace{order}");
        report.push((format!("BJS ff {tag}"), ff.rel_diff(&blocks.bjs_ff)));
        report.push((format!("BJS fe {tag}"), fe.rel_diff(&blocks.bjs_fe)));
        report.push((format!("BJS ee {tag}"), ee.rel_diff(&blocks.bjs_ee)));
        report.push((format!("b_gamma fluid {tag}"), bf.rel_diff(&blocks.b_f)));
        report.push((format!("b_gamma darcy {tag}"), bp.rel_diff(&blocks.b_p)));
        report.push((format!("b_gamma displacement {tag}"), be.rel_diff(&blocks.b_e)));
    }
    report.push(("interface basis reconstruction".into(), misfit));
    report
}

fn random_system(rng: &mut ChaCha8Rng, kind: usize) -> Csr {
    let n = 50;
    let mut t = Triplets::new(n, n);
    match kind {
        0 => {
            for i in 0..n {
                for j in 0..n {
                    t.push(i, j, rng.gen_range(-1.0..1.0));
                }
            }
        }
        1 => {
            for i in 0..n {
                t.push(i, i, rng.gen_range(1.0..2.0) * if rng.gen() { 1.0 } else { -1.0 });
                for _ in 0..6 {
                    t.push(i, rng.gen_range(0..n), rng.gen_range(-1.0..1.0));
                }
            }
        }
        _ => {
            // saddle point [[A, B^T], [B, 0]]
            let (na, nb) = (35, 15);
            let g: Vec<Vec<f64>> = (0..na).map(|_| (0..na).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            for i in 0..na {
                for j in 0..na {
                    let mut s: f64 = (0..na).map(|k| g[k][i] * g[k][j]).sum();
                    if i == j {
                        s += 1.0;
                    }
                    t.push(i, j, s);
                }
            }
            for i in 0..nb {
                for j in 0..na {
                    if rng.gen_bool(0.3) || j == 2 * i {
                        let v = rng.gen_range(-1.0..1.0);
                        t.push(na + i, j, v);
                        t.push(j, na + i, v);
                    }
                }
            }
        }
    }
    t.to_csr()
}

fn norm1(a: &[Vec<f64>]) -> f64 {
    (0..a.len()).map(|j| a.iter().map(|r| r[j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// 1-norm condition number from the explicit inverse.
pub fn condition(a: &Csr) -> f64 {
    let d = a.to_dense();
    let n = d.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| gauss_solve(d.clone(), (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()))
        .collect();
    norm1(&d) * norm1(&cols)
}

/// Largest condition number of the random systems; beyond it no solver can
/// be expected to agree with another to 1e-10.
pub const MAX_CONDITION: f64 = 1e5;

/// Worst relative difference (max norm) between the sparse solver, in both
/// its dense and sparse factorizations, and dense elimination.
pub fn lu_report(systems: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for s in 0..systems {
        let a = loop {
            let a = random_system(&mut rng, s % 3);
            if condition(&a) < MAX_CONDITION {
                break a;
            }
        };
        let b: Vec<f64> = (0..a.nrows).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x_ref = gauss_solve(a.to_dense(), b.clone());
        let norm = x_ref.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for lu in [SparseLu::factor(&a).unwrap(), SparseLu::factor_sparse(&a).unwrap()] {
            let x = lu.solve(&b).unwrap();
            let d = x.iter().zip(&x_ref).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            worst = worst.max(d / norm);
        }
    }
    worst
}
