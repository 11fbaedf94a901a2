use std::sync::Arc;

use super::element::{nodal_points, rt_basis, scalar_basis, trace_basis, ElementFamily, Kind};
use crate::error::{invalid, Result};
use crate::mesh::{cell_outward_normal, BoundaryTag, Mesh2D, Point, LOCAL_EDGES};

/// Affine map from the reference triangle onto a mesh cell.
#[derive(Clone, Copy, Debug)]
pub struct CellGeom {
    pub origin: Point,
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    pub inv: [[f64; 2]; 2],
}

impl CellGeom {
    pub fn new(p: [Point; 3]) -> Self {
        let jac = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        CellGeom {
            origin: p[0],
            jac,
            det,
            inv,
        }
    }

    pub fn map(&self, r: Point) -> Point {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn inverse(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [
            self.inv[0][0] * d[0] + self.inv[0][1] * d[1],
            self.inv[1][0] * d[0] + self.inv[1][1] * d[1],
        ]
    }

    /// Physical gradient from a reference gradient: `J^-T g`.
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv[0][0] * g[0] + self.inv[1][0] * g[1],
            self.inv[0][1] * g[0] + self.inv[1][1] * g[1],
        ]
    }

    /// Contravariant Piola transform `J v / det J`.
    pub fn piola(&self, v: [f64; 2]) -> [f64; 2] {
        [
            (self.jac[0][0] * v[0] + self.jac[0][1] * v[1]) / self.det,
            (self.jac[1][0] * v[0] + self.jac[1][1] * v[1]) / self.det,
        ]
    }
}

/// Physical basis values on one cell at one point.
#[derive(Clone, Debug, Default)]
pub struct BasisValues {
    pub val: Vec<f64>,
    pub grad: Vec<[f64; 2]>,
    pub vval: Vec<[f64; 2]>,
    /// `vgrad[i][r][c] = d(phi_i)_r / dx_c`
    pub vgrad: Vec<[[f64; 2]; 2]>,
    pub div: Vec<f64>,
    sval: Vec<f64>,
    sgrad: Vec<[f64; 2]>,
}

impl BasisValues {
    pub fn new(family: ElementFamily) -> Self {
        let n = family.local_dim();
        let ns = family.scalar().local_dim();
        BasisValues {
            val: vec![0.0; n],
            grad: vec![[0.0; 2]; n],
            vval: vec![[0.0; 2]; n],
            vgrad: vec![[[0.0; 2]; 2]; n],
            div: vec![0.0; n],
            sval: vec![0.0; ns],
            sgrad: vec![[0.0; 2]; ns],
        }
    }
}

/// Finite element space on a mesh: local-to-global maps and orientation signs.
#[derive(Clone, Debug)]
pub struct FESpace {
    family: ElementFamily,
    mesh: Arc<Mesh2D>,
    ndofs: usize,
    nloc: usize,
    dofs: Vec<usize>,
    signs: Vec<f64>,
    trace_edges: Vec<usize>,
}

fn edge_signs(mesh: &Mesh2D, cell: usize, local: usize) -> (f64, f64) {
    let tri = mesh.triangles()[cell];
    let [a, b] = LOCAL_EDGES[local];
    let (ga, gb) = (tri[a], tri[b]);
    let (lo, hi) = if ga < gb { (ga, gb) } else { (gb, ga) };
    let (pl, ph) = (mesh.nodes()[lo], mesh.nodes()[hi]);
    let ng = [ph[1] - pl[1], -(ph[0] - pl[0])];
    let out = cell_outward_normal(mesh.cell_points(cell), local);
    let sn = if out[0] * ng[0] + out[1] * ng[1] > 0.0 { 1.0 } else { -1.0 };
    let st = if ga < gb { 1.0 } else { -1.0 };
    (sn, st)
}

/// Unit normal attached to a global edge: the direction from its lower to
/// its higher node, rotated clockwise.
pub fn global_edge_normal(mesh: &Mesh2D, edge: usize) -> Point {
    let [lo, hi] = mesh.edges()[edge];
    let (pl, ph) = (mesh.nodes()[lo], mesh.nodes()[hi]);
    let len = (ph[0] - pl[0]).hypot(ph[1] - pl[1]);
    [(ph[1] - pl[1]) / len, -(ph[0] - pl[0]) / len]
}

/// Reference coordinates of the point at parameter `t` (0 at the
/// lower-numbered node) along `edge` of `cell`.
pub fn edge_reference_point(mesh: &Mesh2D, cell: usize, edge: usize, t: f64) -> Point {
    let le = mesh
        .cell_edges(cell)
        .iter()
        .position(|&e| e == edge)
        .expect("edge belongs to cell");
    let tri = mesh.triangles()[cell];
    let [a, b] = LOCAL_EDGES[le];
    let local_t = if tri[a] < tri[b] { t } else { 1.0 - t };
    let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let (pa, pb) = (verts[a], verts[b]);
    [pa[0] + local_t * (pb[0] - pa[0]), pa[1] + local_t * (pb[1] - pa[1])]
}

impl FESpace {
    pub fn new(mesh: Arc<Mesh2D>, family: ElementFamily) -> Result<Self> {
        use ElementFamily::*;
        if family.kind() == Kind::Trace {
            return Err(invalid("trace spaces are built with FESpace::trace"));
        }
        let nv = mesh.num_nodes();
        let ne = mesh.num_edges();
        let nc = mesh.num_cells();
        let nloc = family.local_dim();
        let mut dofs = Vec::with_capacity(nc * nloc);
        let mut signs = Vec::with_capacity(nc * nloc);
        let scalar_dofs = |c: usize, out: &mut Vec<usize>| {
            let t = mesh.triangles()[c];
            let e = mesh.cell_edges(c);
            match family.scalar() {
                P0 => out.push(c),
                P1 => out.extend_from_slice(&t),
                P1Dc => out.extend_from_slice(&[3 * c, 3 * c + 1, 3 * c + 2]),
                P1Bubble => out.extend_from_slice(&[t[0], t[1], t[2], nv + c]),
                P2 => out.extend_from_slice(&[t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]]),
                _ => unreachable!(),
            }
        };
        let nscalar = match family.scalar() {
            P0 => nc,
            P1 => nv,
            P1Dc => 3 * nc,
            P1Bubble => nv + nc,
            P2 => nv + ne,
            _ => 0,
        };
        let mut tmp = Vec::with_capacity(6);
        for c in 0..nc {
            match family.kind() {
                Kind::Scalar => {
                    scalar_dofs(c, &mut dofs);
                    signs.extend(std::iter::repeat(1.0).take(nloc));
                }
                Kind::Vector => {
                    tmp.clear();
                    scalar_dofs(c, &mut tmp);
                    for &g in &tmp {
                        dofs.push(2 * g);
                        dofs.push(2 * g + 1);
                    }
                    signs.extend(std::iter::repeat(1.0).take(nloc));
                }
                Kind::HDiv => {
                    let e = mesh.cell_edges(c);
                    for i in 0..3 {
                        let (sn, st) = edge_signs(&mesh, c, i);
                        if family == Rt0 {
                            dofs.push(e[i]);
                            signs.push(sn);
                        } else {
                            dofs.push(2 * e[i]);
                            dofs.push(2 * e[i] + 1);
                            signs.push(sn);
                            signs.push(sn * st);
                        }
                    }
                    if family == Rt1 {
                        dofs.push(2 * ne + 2 * c);
                        dofs.push(2 * ne + 2 * c + 1);
                        signs.push(1.0);
                        signs.push(1.0);
                    }
                }
                Kind::Trace => unreachable!(),
            }
        }
        let ndofs = match family.kind() {
            Kind::Scalar => nscalar,
            Kind::Vector => 2 * nscalar,
            Kind::HDiv => {
                if family == Rt0 {
                    ne
                } else {
                    2 * ne + 2 * nc
                }
            }
            Kind::Trace => unreachable!(),
        };
        Ok(FESpace {
            family,
            mesh,
            ndofs,
            nloc,
            dofs,
            signs,
            trace_edges: Vec::new(),
        })
    }

    /// Discontinuous polynomials of degree `order` on the listed boundary edges.
    pub fn trace(mesh: Arc<Mesh2D>, edges: Vec<usize>, order: u8) -> Result<Self> {
        if order > 1 {
            return Err(invalid(format!("trace order {order} is not supported")));
        }
        if edges.is_empty() {
            return Err(invalid("trace space needs at least one edge"));
        }
        let nloc = order as usize + 1;
        let dofs: Vec<usize> = (0..edges.len() * nloc).collect();
        Ok(FESpace {
            family: ElementFamily::Trace(order),
            mesh,
            ndofs: dofs.len(),
            nloc,
            signs: vec![1.0; dofs.len()],
            dofs,
            trace_edges: edges,
        })
    }

    pub fn family(&self) -> ElementFamily {
        self.family
    }

    pub fn mesh(&self) -> &Arc<Mesh2D> {
        &self.mesh
    }

    pub fn ndofs(&self) -> usize {
        self.ndofs
    }

    pub fn local_dim(&self) -> usize {
        self.nloc
    }

    /// Number of cells, or of edges for a trace space.
    pub fn num_cells(&self) -> usize {
        if self.family.kind() == Kind::Trace {
            self.trace_edges.len()
        } else {
            self.mesh.num_cells()
        }
    }

    pub fn trace_edges(&self) -> &[usize] {
        &self.trace_edges
    }

    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.dofs[cell * self.nloc..(cell + 1) * self.nloc]
    }

    pub fn cell_signs(&self, cell: usize) -> &[f64] {
        &self.signs[cell * self.nloc..(cell + 1) * self.nloc]
    }

    pub fn geom(&self, cell: usize) -> CellGeom {
        CellGeom::new(self.mesh.cell_points(cell))
    }

    /// Fills `out` with physical basis values at reference point `r` of `cell`.
    pub fn eval(&self, cell: usize, geom: &CellGeom, r: Point, out: &mut BasisValues) {
        match self.family.kind() {
            Kind::Scalar => {
                scalar_basis(self.family, r, &mut out.val, &mut out.grad);
                for g in out.grad.iter_mut().take(self.nloc) {
                    *g = geom.grad(*g);
                }
            }
            Kind::Vector => {
                let fam = self.family.scalar();
                scalar_basis(fam, r, &mut out.sval, &mut out.sgrad);
                for s in 0..fam.local_dim() {
                    let g = geom.grad(out.sgrad[s]);
                    let v = out.sval[s];
                    for c in 0..2 {
                        let i = 2 * s + c;
                        out.vval[i] = [0.0; 2];
                        out.vval[i][c] = v;
                        out.vgrad[i] = [[0.0; 2]; 2];
                        out.vgrad[i][c] = g;
                        out.div[i] = g[c];
                    }
                }
            }
            Kind::HDiv => {
                rt_basis(self.family, r, &mut out.vval, &mut out.div);
                let signs = self.cell_signs(cell);
                for i in 0..self.nloc {
                    let v = geom.piola(out.vval[i]);
                    out.vval[i] = [signs[i] * v[0], signs[i] * v[1]];
                    out.div[i] *= signs[i] / geom.det;
                }
            }
            Kind::Trace => panic!("use eval_trace for trace spaces"),
        }
    }

    /// Trace basis on trace cell `k` at global edge parameter `t`
    /// (0 at the lower-numbered node).
    pub fn eval_trace(&self, t: f64, out: &mut [f64]) {
        let ElementFamily::Trace(order) = self.family else {
            panic!("not a trace space");
        };
        trace_basis(order as usize, t, out);
    }

    /// Nodal point of each scalar degree of freedom (Lagrange families only).
    pub fn scalar_dof_points(&self) -> Vec<Point> {
        let fam = self.family.scalar();
        let pts = nodal_points(fam);
        let nscalar = match self.family.kind() {
            Kind::Scalar => self.ndofs,
            Kind::Vector => self.ndofs / 2,
            _ => panic!("{} has no nodal points", self.family),
        };
        let mut out = vec![[f64::NAN; 2]; nscalar];
        let step = if self.family.kind() == Kind::Vector { 2 } else { 1 };
        for c in 0..self.mesh.num_cells() {
            let g = self.geom(c);
            let dofs = self.cell_dofs(c);
            for (k, p) in pts.iter().enumerate() {
                out[dofs[k * step] / step] = g.map(*p);
            }
        }
        out
    }

    /// Degrees of freedom whose support touches an edge carrying `tag`
    /// (Lagrange: vertex and edge nodes; RT: edge moments).
    pub fn boundary_dofs(&self, tag: BoundaryTag) -> Vec<usize> {
        let mut out = Vec::new();
        for e in self.mesh.tagged_edges(tag) {
            out.extend(self.edge_dofs(e));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Degrees of freedom associated with the closure of a mesh edge.
    pub fn edge_dofs(&self, edge: usize) -> Vec<usize> {
        use ElementFamily::*;
        let mesh = &self.mesh;
        let [a, b] = mesh.edges()[edge];
        let nv = mesh.num_nodes();
        let scalar: Vec<usize> = match self.family.scalar() {
            P1 | P1Bubble => vec![a, b],
            P2 => vec![a, b, nv + edge],
            Rt0 => return vec![edge],
            Rt1 => return vec![2 * edge, 2 * edge + 1],
            _ => return Vec::new(),
        };
        match self.family.kind() {
            Kind::Vector => scalar.iter().flat_map(|&s| [2 * s, 2 * s + 1]).collect(),
            _ => scalar,
        }
    }

    /// Nodal interpolant of a vector field (vector Lagrange families). Bubble
    /// coefficients carry the centroid value minus the linear interpolant there.
    pub fn interpolate_vector(&self, f: impl Fn(Point) -> [f64; 2]) -> Result<Vec<f64>> {
        if self.family.kind() != Kind::Vector {
            return Err(invalid(format!("{} is not a vector Lagrange family", self.family)));
        }
        let pts = self.scalar_dof_points();
        let mut out = vec![0.0; self.ndofs];
        for (s, p) in pts.iter().enumerate() {
            let v = f(*p);
            out[2 * s] = v[0];
            out[2 * s + 1] = v[1];
        }
        if self.family.scalar() == ElementFamily::P1Bubble {
            let nv = self.mesh.num_nodes();
            for (c, t) in self.mesh.triangles().iter().enumerate() {
                for k in 0..2 {
                    let lin: f64 = t.iter().map(|&v| out[2 * v + k]).sum::<f64>() / 3.0;
                    out[2 * (nv + c) + k] -= lin;
                }
            }
        }
        Ok(out)
    }

    /// Nodal interpolant of a scalar field (scalar Lagrange families).
    pub fn interpolate_scalar(&self, f: impl Fn(Point) -> f64) -> Result<Vec<f64>> {
        if self.family.kind() != Kind::Scalar {
            return Err(invalid(format!("{} is not a scalar Lagrange family", self.family)));
        }
        let mut out: Vec<f64> = self.scalar_dof_points().into_iter().map(f).collect();
        if self.family == ElementFamily::P1Bubble {
            let nv = self.mesh.num_nodes();
            for (c, t) in self.mesh.triangles().iter().enumerate() {
                let lin: f64 = t.iter().map(|&v| out[v]).sum::<f64>() / 3.0;
                out[nv + c] -= lin;
            }
        }
        Ok(out)
    }

    /// Values of a scalar field at a reference point of a cell.
    pub fn eval_scalar(
        &self,
        coef: &[f64],
        cell: usize,
        geom: &CellGeom,
        r: Point,
        buf: &mut BasisValues,
    ) -> (f64, [f64; 2]) {
        self.eval(cell, geom, r, buf);
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for (i, &d) in self.cell_dofs(cell).iter().enumerate() {
            v += coef[d] * buf.val[i];
            g[0] += coef[d] * buf.grad[i][0];
            g[1] += coef[d] * buf.grad[i][1];
        }
        (v, g)
    }

    /// Value, gradient (Lagrange only) and divergence of a vector field.
    pub fn eval_vector(
        &self,
        coef: &[f64],
        cell: usize,
        geom: &CellGeom,
        r: Point,
        buf: &mut BasisValues,
    ) -> ([f64; 2], [[f64; 2]; 2], f64) {
        self.eval(cell, geom, r, buf);
        let mut v = [0.0; 2];
        let mut g = [[0.0; 2]; 2];
        let mut d = 0.0;
        let lagrange = self.family.kind() == Kind::Vector;
        for (i, &dof) in self.cell_dofs(cell).iter().enumerate() {
            let c = coef[dof];
            v[0] += c * buf.vval[i][0];
            v[1] += c * buf.vval[i][1];
            d += c * buf.div[i];
            if lagrange {
                for r in 0..2 {
                    for k in 0..2 {
                        g[r][k] += c * buf.vgrad[i][r][k];
                    }
                }
            }
        }
        (v, g, d)
    }
}
