//! Discrete space-time error norms and convergence tables.

use crate::fe::{edge_rule, triangle_rule, BasisValues, FESpace, Kind};
use crate::mesh::Point;
use crate::parallel::map_indexed;

/// Squared error and squared exact norm of one field at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SquaredNorms {
    pub error: f64,
    pub exact: f64,
}

impl std::ops::Add for SquaredNorms {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        SquaredNorms {
            error: self.error + o.error,
            exact: self.exact + o.exact,
        }
    }
}

fn rule(space: &FESpace) -> crate::fe::QuadratureRule {
    triangle_rule(2 * space.family().degree() + 5).expect("supported degree")
}

fn sum(parts: Vec<SquaredNorms>) -> SquaredNorms {
    parts.into_iter().fold(SquaredNorms::default(), |a, b| a + b)
}

/// `L^2` norms of `u_h - u` and `u` for a scalar field.
pub fn scalar_l2(space: &FESpace, coef: &[f64], exact: &(dyn Fn(Point) -> f64 + Sync)) -> SquaredNorms {
    let q = rule(space);
    sum(map_indexed(space.num_cells(), |c| {
        let g = space.geom(c);
        let mut buf = BasisValues::new(space.family());
        let mut out = SquaredNorms::default();
        for (p, w) in q.points.iter().zip(&q.weights) {
            let (v, _) = space.eval_scalar(coef, c, &g, *p, &mut buf);
            let u = exact(g.map(*p));
            out.error += w * g.det * (v - u).powi(2);
            out.exact += w * g.det * u * u;
        }
        out
    }))
}

/// `L^2` norms for a vector field (Lagrange or H(div)).
pub fn vector_l2(
    space: &FESpace,
    coef: &[f64],
    exact: &(dyn Fn(Point) -> [f64; 2] + Sync),
) -> SquaredNorms {
    let q = rule(space);
    sum(map_indexed(space.num_cells(), |c| {
        let g = space.geom(c);
        let mut buf = BasisValues::new(space.family());
        let mut out = SquaredNorms::default();
        for (p, w) in q.points.iter().zip(&q.weights) {
            let (v, _, _) = space.eval_vector(coef, c, &g, *p, &mut buf);
            let u = exact(g.map(*p));
            out.error += w * g.det * ((v[0] - u[0]).powi(2) + (v[1] - u[1]).powi(2));
            out.exact += w * g.det * (u[0] * u[0] + u[1] * u[1]);
        }
        out
    }))
}

/// Full `H^1` norms (value plus gradient) for a vector Lagrange field.
pub fn vector_h1(
    space: &FESpace,
    coef: &[f64],
    exact: &(dyn Fn(Point) -> [f64; 2] + Sync),
    exact_grad: &(dyn Fn(Point) -> [[f64; 2]; 2] + Sync),
) -> SquaredNorms {
    assert_eq!(space.family().kind(), Kind::Vector);
    let q = rule(space);
    sum(map_indexed(space.num_cells(), |c| {
        let g = space.geom(c);
        let mut buf = BasisValues::new(space.family());
        let mut out = SquaredNorms::default();
        for (p, w) in q.points.iter().zip(&q.weights) {
            let (v, dv, _) = space.eval_vector(coef, c, &g, *p, &mut buf);
            let x = g.map(*p);
            let u = exact(x);
            let du = exact_grad(x);
            let mut e = (v[0] - u[0]).powi(2) + (v[1] - u[1]).powi(2);
            let mut n = u[0] * u[0] + u[1] * u[1];
            for r in 0..2 {
                for k in 0..2 {
                    e += (dv[r][k] - du[r][k]).powi(2);
                    n += du[r][k] * du[r][k];
                }
            }
            out.error += w * g.det * e;
            out.exact += w * g.det * n;
        }
        out
    }))
}

/// `L^2` norms on the edges of a trace space.
pub fn trace_l2(space: &FESpace, coef: &[f64], exact: &(dyn Fn(Point) -> f64 + Sync)) -> SquaredNorms {
    assert_eq!(space.family().kind(), Kind::Trace);
    let q = edge_rule(2 * space.family().degree() + 5).expect("supported degree");
    let mesh = space.mesh();
    let mut vals = vec![0.0; space.local_dim()];
    let mut out = SquaredNorms::default();
    for (k, &e) in space.trace_edges().iter().enumerate() {
        let [a, b] = mesh.edges()[e];
        let (pa, pb) = (mesh.nodes()[a], mesh.nodes()[b]);
        let len = mesh.edge_length(e);
        let dofs = space.cell_dofs(k);
        for (t, w) in q.points.iter().zip(&q.weights) {
            space.eval_trace(*t, &mut vals);
            let v: f64 = dofs.iter().zip(&vals).map(|(&d, b)| coef[d] * b).sum();
            let u = exact([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
            out.error += w * len * (v - u).powi(2);
            out.exact += w * len * u * u;
        }
    }
    out
}

/// Accumulates `l^2(0,T)` (sum over steps 1..N times tau) and `l^inf(0,T)`
/// (max over steps 0..N) norms of one field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimeNorm {
    pub l2: SquaredNorms,
    pub linf_error: f64,
    pub linf_exact: f64,
}

impl TimeNorm {
    pub fn add_step(&mut self, n: usize, tau: f64, s: SquaredNorms) {
        if n > 0 {
            self.l2.error += tau * s.error;
            self.l2.exact += tau * s.exact;
        }
        self.linf_error = self.linf_error.max(s.error.sqrt());
        self.linf_exact = self.linf_exact.max(s.exact.sqrt());
    }

    /// Relative `l^2` error; absolute if the exact norm vanishes.
    pub fn rel_l2(&self) -> f64 {
        relative(self.l2.error.sqrt(), self.l2.exact.sqrt())
    }

    pub fn rel_linf(&self) -> f64 {
        relative(self.linf_error, self.linf_exact)
    }
}

/// `e / n`, or `e` itself when `n` vanishes.
pub fn relative(e: f64, n: f64) -> f64 {
    if n > 0.0 {
        e / n
    } else {
        e
    }
}

/// `log2(e_coarse / e_fine)` for consecutive entries.
pub fn rates(errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = vec![None];
    for w in errors.windows(2) {
        out.push(if w[0] > 0.0 && w[1] > 0.0 {
            Some((w[0] / w[1]).log2())
        } else {
            None
        });
    }
    out
}
