use std::collections::HashMap;

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use super::{signed_area, BoundaryEdge, BoundaryTag, Mesh2D, Point, Subdomain};
use crate::error::{invalid, Error, Result};

/// Reference reservoir `[0, 1] x [-1, 1]` cut by a half-ellipse fracture
/// `x^2/a2 + y^2/b2 <= 1, x >= 0` whose mouth on `x = 0` is the inflow segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractureGeometry {
    pub a2: f64,
    pub b2: f64,
}

impl Default for FractureGeometry {
    fn default() -> Self {
        FractureGeometry { a2: 0.5, b2: 0.0025 }
    }
}

impl FractureGeometry {
    pub fn half_width(&self) -> f64 {
        self.b2.sqrt()
    }

    pub fn length(&self) -> f64 {
        self.a2.sqrt()
    }

    /// Points along the fracture boundary from `(0, -b)` to `(0, b)`, equally
    /// spaced in arclength with spacing close to `h`.
    pub fn arc_samples(&self, h: f64) -> Vec<Point> {
        let (a, b) = (self.length(), self.half_width());
        let half_pi = std::f64::consts::FRAC_PI_2;
        let fine = 20_000;
        let pt = |t: f64| [a * t.cos(), b * t.sin()];
        let mut cum = Vec::with_capacity(fine + 1);
        cum.push(0.0);
        let mut prev = pt(-half_pi);
        for k in 1..=fine {
            let t = -half_pi + std::f64::consts::PI * k as f64 / fine as f64;
            let p = pt(t);
            cum.push(cum[k - 1] + (p[0] - prev[0]).hypot(p[1] - prev[1]));
            prev = p;
        }
        let total = cum[fine];
        let n = ((total / h).ceil() as usize).max(8);
        let mut out = Vec::with_capacity(n + 1);
        let mut k = 0;
        for i in 0..=n {
            if i == 0 {
                out.push([0.0, -b]);
                continue;
            }
            if i == n {
                out.push([0.0, b]);
                continue;
            }
            let s = total * i as f64 / n as f64;
            while cum[k + 1] < s {
                k += 1;
            }
            let w = (s - cum[k]) / (cum[k + 1] - cum[k]);
            let t = -half_pi + std::f64::consts::PI * (k as f64 + w) / fine as f64;
            out.push(pt(t));
        }
        out
    }
}

fn inside_polygon(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn side_points(from: Point, to: Point, h: f64, out: &mut Vec<Point>) {
    let len = (to[0] - from[0]).hypot(to[1] - from[1]);
    let n = ((len / h).ceil() as usize).max(1);
    for i in 0..n {
        let s = i as f64 / n as f64;
        out.push([from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])]);
    }
}

/// Triangulates the reference fracture domain with target edge length
/// `resolution`; returns the fluid (fracture) and poroelastic meshes, which
/// share their interface nodes.
pub fn build_fracture_domain(
    geometry: FractureGeometry,
    resolution: f64,
) -> Result<(Mesh2D, Mesh2D)> {
    let b = geometry.half_width();
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(invalid("resolution must be positive"));
    }
    if resolution > b {
        return Err(invalid(format!(
            "resolution {resolution} is too coarse to resolve fracture half-width {b}"
        )));
    }
    if !(geometry.a2 > 0.0 && geometry.length() < 1.0 && b < 1.0) {
        return Err(invalid("fracture must fit inside the reference domain"));
    }
    let h = resolution;

    // Outer boundary, starting at the upper end of the mouth.
    let mut outer = Vec::new();
    side_points([0.0, b], [0.0, 1.0], h, &mut outer);
    side_points([0.0, 1.0], [1.0, 1.0], h, &mut outer);
    side_points([1.0, 1.0], [1.0, -1.0], h, &mut outer);
    side_points([1.0, -1.0], [0.0, -1.0], h, &mut outer);
    side_points([0.0, -1.0], [0.0, -b], h, &mut outer);
    let mouth = outer.len();
    side_points([0.0, -b], [0.0, b], h.min(b), &mut outer);

    let arc = geometry.arc_samples(h);
    let mut vertices: Vec<Point2<f64>> = outer.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let n_outer = vertices.len();
    let mut edges: Vec<[usize; 2]> = (0..n_outer).map(|i| [i, (i + 1) % n_outer]).collect();
    // arc endpoints coincide with the mouth corners already in `outer`
    let lower = mouth;
    let upper = 0;
    let mut prev = lower;
    for p in &arc[1..arc.len() - 1] {
        vertices.push(Point2::new(p[0], p[1]));
        let id = vertices.len() - 1;
        edges.push([prev, id]);
        prev = id;
    }
    edges.push([prev, upper]);

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::bulk_load_cdt(vertices, edges)
            .map_err(|e| Error::DegenerateGeometry(format!("triangulation failed: {e:?}")))?;
    let expected = (2.0 / (0.433 * h * h)) as usize;
    let result = cdt.refine(
        RefinementParameters::<f64>::new()
            .with_max_allowed_area(0.433 * h * h)
            .with_angle_limit(AngleLimit::from_deg(25.0))
            .with_max_additional_vertices(20 * expected + 10_000)
            .exclude_outer_faces(false),
    );
    if !result.refinement_complete {
        return Err(Error::DegenerateGeometry(
            "mesh refinement did not complete".into(),
        ));
    }

    let nodes: Vec<Point> = cdt
        .vertices()
        .map(|v| {
            let p = v.position();
            [p.x, p.y]
        })
        .collect();
    let lens: Vec<Point> = arc.clone();
    let mut tris = Vec::new();
    let mut subs = Vec::new();
    for f in cdt.inner_faces() {
        let vs = f.vertices();
        let mut t = [vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()];
        if signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
        let c = [
            (nodes[t[0]][0] + nodes[t[1]][0] + nodes[t[2]][0]) / 3.0,
            (nodes[t[0]][1] + nodes[t[1]][1] + nodes[t[2]][1]) / 3.0,
        ];
        tris.push(t);
        subs.push(if inside_polygon(&lens, c) {
            Subdomain::Fluid
        } else {
            Subdomain::Poro
        });
    }

    let mut count: HashMap<[usize; 2], usize> = HashMap::new();
    for t in &tris {
        for k in 0..3 {
            let (a, c) = (t[k], t[(k + 1) % 3]);
            *count.entry([a.min(c), a.max(c)]).or_default() += 1;
        }
    }
    let eps = 1e-12;
    let mut keys: Vec<[usize; 2]> = count
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .map(|(k, _)| k)
        .collect();
    keys.sort_unstable();
    let mut boundary = Vec::with_capacity(keys.len());
    for [a, c] in keys {
        let (p, q) = (nodes[a], nodes[c]);
        let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
        let tag = if p[0].abs() < eps && q[0].abs() < eps {
            if mid[1].abs() < b {
                BoundaryTag::Inflow
            } else {
                BoundaryTag::Left
            }
        } else if (p[0] - 1.0).abs() < eps && (q[0] - 1.0).abs() < eps {
            BoundaryTag::Right
        } else if (p[1] + 1.0).abs() < eps && (q[1] + 1.0).abs() < eps {
            BoundaryTag::Bottom
        } else if (p[1] - 1.0).abs() < eps && (q[1] - 1.0).abs() < eps {
            BoundaryTag::Top
        } else {
            return Err(Error::DegenerateGeometry(format!(
                "boundary edge at ({}, {}) is not on the outer rectangle",
                mid[0], mid[1]
            )));
        };
        boundary.push(BoundaryEdge { nodes: [a, c], tag });
    }
    let full = Mesh2D::new(nodes, tris, subs, boundary)?;
    let fluid = full.extract(Subdomain::Fluid, BoundaryTag::Interface)?;
    let poro = full.extract(Subdomain::Poro, BoundaryTag::Interface)?;
    Ok((fluid, poro))
}
