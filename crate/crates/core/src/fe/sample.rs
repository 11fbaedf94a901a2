//! Point samples and cell averages of finite element fields.

use super::element::{nodal_points, ElementFamily};
use super::quadrature::triangle_rule;
use super::space::{BasisValues, FESpace};
use crate::mesh::Point;

const VERTICES: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
const CENTROID: Point = [1.0 / 3.0, 1.0 / 3.0];

fn per_vertex<T: Copy + Default>(
    space: &FESpace,
    value: impl Fn(usize, Point, &mut BasisValues) -> T,
    add: impl Fn(T, T) -> T,
    scale: impl Fn(T, f64) -> T,
) -> Vec<T> {
    let mesh = space.mesh();
    let mut sum = vec![T::default(); mesh.num_nodes()];
    let mut count = vec![0usize; mesh.num_nodes()];
    let mut buf = BasisValues::new(space.family());
    for c in 0..space.num_cells() {
        for (k, &node) in mesh.triangles()[c].iter().enumerate() {
            sum[node] = add(sum[node], value(c, VERTICES[k], &mut buf));
            count[node] += 1;
        }
    }
    sum.into_iter()
        .zip(count)
        .map(|(s, n)| if n > 0 { scale(s, 1.0 / n as f64) } else { s })
        .collect()
}

/// Scalar field at mesh vertices, averaged over adjacent cells (exact for
/// continuous fields).
pub fn vertex_scalar(space: &FESpace, coef: &[f64]) -> Vec<f64> {
    per_vertex(
        space,
        |c, r, b| space.eval_scalar(coef, c, &space.geom(c), r, b).0,
        |a, b| a + b,
        |a, s| a * s,
    )
}

/// Vector field at mesh vertices, averaged over adjacent cells.
pub fn vertex_vector(space: &FESpace, coef: &[f64]) -> Vec<[f64; 2]> {
    per_vertex(
        space,
        |c, r, b| space.eval_vector(coef, c, &space.geom(c), r, b).0,
        |a, b| [a[0] + b[0], a[1] + b[1]],
        |a, s| [a[0] * s, a[1] * s],
    )
}

pub fn centroid_vector(space: &FESpace, coef: &[f64]) -> Vec<[f64; 2]> {
    let mut buf = BasisValues::new(space.family());
    (0..space.num_cells())
        .map(|c| space.eval_vector(coef, c, &space.geom(c), CENTROID, &mut buf).0)
        .collect()
}

/// Mean value of a scalar field on every cell.
pub fn cell_average(space: &FESpace, coef: &[f64]) -> Vec<f64> {
    let rule = triangle_rule(space.family().degree().max(1)).expect("supported degree");
    let mut buf = BasisValues::new(space.family());
    (0..space.num_cells())
        .map(|c| {
            let g = space.geom(c);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * space.eval_scalar(coef, c, &g, *p, &mut buf).0)
                .sum::<f64>()
                / rule.weights.iter().sum::<f64>()
        })
        .collect()
}

/// Largest magnitude of a vector field sampled at the nodal points of the
/// matching Lagrange family (vertices, plus edge midpoints for quadratics).
pub fn max_sampled_magnitude(space: &FESpace, coef: &[f64]) -> f64 {
    let pts = match space.family().degree() {
        0 | 1 => nodal_points(ElementFamily::P1),
        _ => nodal_points(ElementFamily::P2),
    };
    let mut buf = BasisValues::new(space.family());
    let mut m: f64 = 0.0;
    for c in 0..space.num_cells() {
        let g = space.geom(c);
        for p in &pts {
            let v = space.eval_vector(coef, c, &g, *p, &mut buf).0;
            m = m.max(v[0].hypot(v[1]));
        }
    }
    m
}
