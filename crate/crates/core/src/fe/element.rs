//! Reference-element bases.
//!
//! Reference triangle vertices are `(0,0), (1,0), (0,1)`; barycentric
//! coordinates `l0 = 1-x-y, l1 = x, l2 = y`. Local edge `i` joins the two
//! vertices other than `i`, traversed from the lower to the higher local index.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::mesh::{Point, LOCAL_EDGES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementFamily {
    P0,
    P1,
    P1Dc,
    P2,
    P1Bubble,
    Rt0,
    Rt1,
    VecP1,
    VecP1Bubble,
    VecP2,
    /// Discontinuous polynomials of the given order on interface edges.
    Trace(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Vector,
    HDiv,
    Trace,
}

impl ElementFamily {
    pub fn kind(self) -> Kind {
        use ElementFamily::*;
        match self {
            P0 | P1 | P1Dc | P2 | P1Bubble => Kind::Scalar,
            VecP1 | VecP1Bubble | VecP2 => Kind::Vector,
            Rt0 | Rt1 => Kind::HDiv,
            Trace(_) => Kind::Trace,
        }
    }

    /// Highest polynomial degree appearing in the basis.
    pub fn degree(self) -> usize {
        use ElementFamily::*;
        match self {
            P0 => 0,
            P1 | P1Dc | VecP1 | Rt0 => 1,
            P2 | VecP2 | Rt1 => 2,
            P1Bubble | VecP1Bubble => 3,
            Trace(k) => k as usize,
        }
    }

    /// Scalar family underlying a vector Lagrange family.
    pub fn scalar(self) -> ElementFamily {
        use ElementFamily::*;
        match self {
            VecP1 => P1,
            VecP1Bubble => P1Bubble,
            VecP2 => P2,
            other => other,
        }
    }

    /// Number of reference basis functions on one cell (one edge for traces).
    pub fn local_dim(self) -> usize {
        use ElementFamily::*;
        match self {
            P0 => 1,
            P1 | P1Dc => 3,
            P1Bubble => 4,
            P2 => 6,
            Rt0 => 3,
            Rt1 => 8,
            VecP1 => 6,
            VecP1Bubble => 8,
            VecP2 => 12,
            Trace(k) => k as usize + 1,
        }
    }

    pub fn name(self) -> String {
        use ElementFamily::*;
        match self {
            P0 => "P0".into(),
            P1 => "P1".into(),
            P1Dc => "P1dc".into(),
            P2 => "P2".into(),
            P1Bubble => "P1b".into(),
            Rt0 => "RT0".into(),
            Rt1 => "RT1".into(),
            VecP1 => "vP1".into(),
            VecP1Bubble => "vP1b".into(),
            VecP2 => "vP2".into(),
            Trace(k) => format!("trace{k}"),
        }
    }
}

impl fmt::Display for ElementFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ElementFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        use ElementFamily::*;
        Ok(match s {
            "P0" => P0,
            "P1" => P1,
            "P1dc" => P1Dc,
            "P2" => P2,
            "P1b" => P1Bubble,
            "RT0" => Rt0,
            "RT1" => Rt1,
            "vP1" => VecP1,
            "vP1b" => VecP1Bubble,
            "vP2" => VecP2,
            "trace0" => Trace(0),
            "trace1" => Trace(1),
            _ => return Err(format!("unknown element family '{s}'")),
        })
    }
}

/// Values and reference gradients of a scalar Lagrange family at `p`.
pub fn scalar_basis(family: ElementFamily, p: Point, val: &mut [f64], grad: &mut [[f64; 2]]) {
    use ElementFamily::*;
    let l = [1.0 - p[0] - p[1], p[0], p[1]];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match family {
        P0 => {
            val[0] = 1.0;
            grad[0] = [0.0, 0.0];
        }
        P1 | P1Dc => {
            val[..3].copy_from_slice(&l);
            grad[..3].copy_from_slice(&dl);
        }
        P1Bubble => {
            val[..3].copy_from_slice(&l);
            grad[..3].copy_from_slice(&dl);
            val[3] = 27.0 * l[0] * l[1] * l[2];
            for k in 0..2 {
                grad[3][k] = 27.0
                    * (dl[0][k] * l[1] * l[2] + l[0] * dl[1][k] * l[2] + l[0] * l[1] * dl[2][k]);
            }
        }
        P2 => {
            for i in 0..3 {
                val[i] = l[i] * (2.0 * l[i] - 1.0);
                for k in 0..2 {
                    grad[i][k] = (4.0 * l[i] - 1.0) * dl[i][k];
                }
            }
            for (e, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                val[3 + e] = 4.0 * l[*a] * l[*b];
                for k in 0..2 {
                    grad[3 + e][k] = 4.0 * (dl[*a][k] * l[*b] + l[*a] * dl[*b][k]);
                }
            }
        }
        _ => panic!("{family} is not a scalar Lagrange family"),
    }
}

/// Reference points carrying the nodal degrees of freedom of a scalar family.
/// Bubble functions are attached to the centroid.
pub fn nodal_points(family: ElementFamily) -> Vec<Point> {
    use ElementFamily::*;
    let v = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    match family {
        P0 => vec![[1.0 / 3.0, 1.0 / 3.0]],
        P1 | P1Dc => v.to_vec(),
        P1Bubble => vec![v[0], v[1], v[2], [1.0 / 3.0, 1.0 / 3.0]],
        P2 => {
            let mut p = v.to_vec();
            for [a, b] in LOCAL_EDGES {
                p.push([(v[a][0] + v[b][0]) / 2.0, (v[a][1] + v[b][1]) / 2.0]);
            }
            p
        }
        _ => panic!("{family} has no nodal points"),
    }
}

/// Outward unit normal of reference edge `i`.
pub fn reference_normal(i: usize) -> Point {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match i {
        0 => [s, s],
        1 => [-1.0, 0.0],
        _ => [0.0, -1.0],
    }
}

const REF_VERTS: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Point on reference edge `i` at parameter `t` (local orientation).
pub fn reference_edge_point(i: usize, t: f64) -> Point {
    let [a, b] = LOCAL_EDGES[i];
    let (pa, pb) = (REF_VERTS[a], REF_VERTS[b]);
    [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
}

fn reference_edge_length(i: usize) -> f64 {
    if i == 0 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

// Prime bases: RT0 = {(1,0), (0,1), (x,y)}; RT1 = P1^2 + x P1-homogeneous.
fn rt_prime(order: usize, p: Point, val: &mut [[f64; 2]], div: &mut [f64]) {
    let [x, y] = p;
    if order == 0 {
        val[0] = [1.0, 0.0];
        val[1] = [0.0, 1.0];
        val[2] = [x, y];
        div[..3].copy_from_slice(&[0.0, 0.0, 2.0]);
    } else {
        val[0] = [1.0, 0.0];
        val[1] = [x, 0.0];
        val[2] = [y, 0.0];
        val[3] = [0.0, 1.0];
        val[4] = [0.0, x];
        val[5] = [0.0, y];
        val[6] = [x * x, x * y];
        val[7] = [x * y, y * y];
        div[..8].copy_from_slice(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 3.0 * x, 3.0 * y]);
    }
}

/// Coefficients of the nodal RT basis in the prime basis, `coef[prime][basis]`.
fn rt_coefficients(order: usize) -> &'static Vec<Vec<f64>> {
    static RT0: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    static RT1: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let cell = if order == 0 { &RT0 } else { &RT1 };
    cell.get_or_init(|| {
        let n = if order == 0 { 3 } else { 8 };
        let mut dual = vec![vec![0.0; n]; n];
        let edge = super::quadrature::edge_rule(6).unwrap();
        let tri = super::quadrature::triangle_rule(6).unwrap();
        let mut val = [[0.0; 2]; 8];
        let mut div = [0.0; 8];
        let moments = order + 1;
        for e in 0..3 {
            let nrm = reference_normal(e);
            let len = reference_edge_length(e);
            for (t, w) in edge.points.iter().zip(&edge.weights) {
                rt_prime(order, reference_edge_point(e, *t), &mut val, &mut div);
                let q = [1.0, 2.0 * t - 1.0];
                for m in 0..moments {
                    for j in 0..n {
                        let vn = val[j][0] * nrm[0] + val[j][1] * nrm[1];
                        dual[e * moments + m][j] += w * len * vn * q[m];
                    }
                }
            }
        }
        if order == 1 {
            for (p, w) in tri.points.iter().zip(&tri.weights) {
                rt_prime(order, *p, &mut val, &mut div);
                for j in 0..n {
                    dual[6][j] += w * val[j][0];
                    dual[7][j] += w * val[j][1];
                }
            }
        }
        invert(dual)
    })
}

fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        a.swap(c, piv);
        inv.swap(c, piv);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for j in 0..n {
                        a[r][j] -= f * a[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    inv
}

/// Reference RT basis values and divergences at `p`. Degrees of freedom are
/// ordered edge by edge (constant moment, then linear Legendre moment for
/// RT1), followed by the two interior moments of RT1.
pub fn rt_basis(family: ElementFamily, p: Point, val: &mut [[f64; 2]], div: &mut [f64]) {
    let order = match family {
        ElementFamily::Rt0 => 0,
        ElementFamily::Rt1 => 1,
        _ => panic!("{family} is not a Raviart-Thomas family"),
    };
    let n = family.local_dim();
    let coef = rt_coefficients(order);
    let mut pv = [[0.0; 2]; 8];
    let mut pd = [0.0; 8];
    rt_prime(order, p, &mut pv, &mut pd);
    for k in 0..n {
        let mut v = [0.0; 2];
        let mut d = 0.0;
        for j in 0..n {
            let c = coef[j][k];
            v[0] += c * pv[j][0];
            v[1] += c * pv[j][1];
            d += c * pd[j];
        }
        val[k] = v;
        div[k] = d;
    }
}

/// Edge parameter polynomials used as trace basis and RT edge moments.
pub fn trace_basis(order: usize, t: f64, val: &mut [f64]) {
    val[0] = 1.0;
    if order >= 1 {
        val[1] = 2.0 * t - 1.0;
    }
}
