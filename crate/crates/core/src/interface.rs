//! Pairing of the fluid and poroelastic interface traces.
//!
//! The poroelastic interface edges are chained into a polyline and
//! parametrized by arclength `s`. Fluid interface nodes are projected onto
//! this polyline; the union of all breakpoints splits the interface into
//! segments, each lying inside exactly one poroelastic and one fluid edge.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fe::{edge_reference_point, edge_rule, CellGeom};
use crate::mesh::{dist, BoundaryTag, Mesh2D, Point};

#[derive(Clone, Debug)]
pub struct Segment {
    /// Position of the poroelastic edge in `InterfacePairing::poro_edges`.
    pub trace: usize,
    pub poro_edge: usize,
    pub poro_cell: usize,
    pub fluid_edge: usize,
    pub fluid_cell: usize,
    /// Edge parameters (0 at the lower-numbered node) of the segment ends.
    pub t_poro: [f64; 2],
    pub t_fluid: [f64; 2],
    pub length: f64,
    /// Outward unit normals of the two subdomains.
    pub n_poro: Point,
    pub n_fluid: Point,
    pub tangent: Point,
}

/// Quadrature point on a segment with its preimages in both adjacent cells.
#[derive(Clone, Copy, Debug)]
pub struct SegmentPoint {
    pub x: Point,
    pub weight: f64,
    pub r_fluid: Point,
    pub r_poro: Point,
    pub t_poro: f64,
}

#[derive(Clone, Debug)]
pub struct InterfacePairing {
    pub segments: Vec<Segment>,
    /// Poroelastic interface edges in chain order; the multiplier space lives on these.
    pub poro_edges: Vec<usize>,
    pub fluid_edges: Vec<usize>,
    pub matching: bool,
    pub length: f64,
}

fn chain(mesh: &Mesh2D, edges: &[usize]) -> Result<Vec<usize>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edges {
        for v in mesh.edges()[e] {
            adj.entry(v).or_default().push(e);
        }
    }
    if adj.values().any(|l| l.len() > 2) {
        return Err(Error::GeometryMismatch(
            "interface is not a simple curve".into(),
        ));
    }
    let mut ends: Vec<usize> = adj.iter().filter(|(_, l)| l.len() == 1).map(|(&v, _)| v).collect();
    ends.sort_unstable();
    let start = match ends.first() {
        Some(&v) => v,
        None => mesh.edges()[edges[0]][0],
    };
    let mut nodes = vec![start];
    let mut used = vec![false; mesh.num_edges()];
    let mut cur = start;
    loop {
        let next = adj[&cur].iter().copied().find(|&e| !used[e]);
        let Some(e) = next else { break };
        used[e] = true;
        let [a, b] = mesh.edges()[e];
        cur = if a == cur { b } else { a };
        nodes.push(cur);
    }
    if nodes.len() != edges.len() + 1 {
        return Err(Error::GeometryMismatch(
            "interface has more than one connected component".into(),
        ));
    }
    Ok(nodes)
}

fn project(p: Point, a: Point, b: Point) -> (f64, f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0);
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (t, dist(p, q))
}

impl InterfacePairing {
    /// Builds the common refinement of the two interface traces. `tol` bounds
    /// the distance between the traces; `None` uses `1e-10 * |Gamma|`.
    pub fn new(fluid: &Mesh2D, poro: &Mesh2D, tol: Option<f64>) -> Result<Self> {
        let p_edges = poro.tagged_edges(BoundaryTag::Interface);
        let f_edges = fluid.tagged_edges(BoundaryTag::Interface);
        if p_edges.is_empty() || f_edges.is_empty() {
            return Err(Error::GeometryMismatch(
                "both meshes need interface edges".into(),
            ));
        }
        let chain_nodes = chain(poro, &p_edges)?;
        let pts: Vec<Point> = chain_nodes.iter().map(|&v| poro.nodes()[v]).collect();
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            cum.push(cum.last().unwrap() + dist(w[0], w[1]));
        }
        let total = *cum.last().unwrap();
        let tol = tol.unwrap_or(1e-10 * total);

        // chain-ordered poro edges
        let mut edge_of: HashMap<[usize; 2], usize> = HashMap::new();
        for &e in &p_edges {
            edge_of.insert(poro.edges()[e], e);
        }
        let poro_chain: Vec<usize> = chain_nodes
            .windows(2)
            .map(|w| edge_of[&[w[0].min(w[1]), w[0].max(w[1])]])
            .collect();

        // arclength of every fluid interface node
        let mut s_of: HashMap<usize, f64> = HashMap::new();
        for &e in &f_edges {
            for v in fluid.edges()[e] {
                if s_of.contains_key(&v) {
                    continue;
                }
                let p = fluid.nodes()[v];
                let mut best = (f64::INFINITY, 0.0);
                for k in 0..pts.len() - 1 {
                    let (t, d) = project(p, pts[k], pts[k + 1]);
                    if d < best.0 {
                        best = (d, cum[k] + t * (cum[k + 1] - cum[k]));
                    }
                }
                if best.0 > tol {
                    return Err(Error::GeometryMismatch(format!(
                        "fluid interface node ({}, {}) is {:e} away from the poroelastic trace",
                        p[0], p[1], best.0
                    )));
                }
                s_of.insert(v, best.1);
            }
        }
        for &p in &pts {
            let d = f_edges
                .iter()
                .map(|&e| {
                    let [a, b] = fluid.edges()[e];
                    project(p, fluid.nodes()[a], fluid.nodes()[b]).1
                })
                .fold(f64::INFINITY, f64::min);
            if d > tol {
                return Err(Error::GeometryMismatch(format!(
                    "poroelastic interface node ({}, {}) is {d:e} away from the fluid trace",
                    p[0], p[1]
                )));
            }
        }

        let mut breaks: Vec<f64> = cum.clone();
        breaks.extend(s_of.values().copied());
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let merge = 1e-10 * total;
        let mut uniq: Vec<f64> = Vec::with_capacity(breaks.len());
        for s in breaks {
            if uniq.last().is_none_or(|&l| s - l > merge) {
                uniq.push(s);
            }
        }
        if (uniq[0]).abs() > merge || (uniq.last().unwrap() - total).abs() > merge {
            return Err(Error::GeometryMismatch(
                "fluid trace extends beyond the poroelastic trace".into(),
            ));
        }
        *uniq.last_mut().unwrap() = total;
        uniq[0] = 0.0;

        let f_ranges: Vec<(usize, f64, f64)> = f_edges
            .iter()
            .map(|&e| {
                let [a, b] = fluid.edges()[e];
                (e, s_of[&a], s_of[&b])
            })
            .collect();

        let mut segments = Vec::with_capacity(uniq.len() - 1);
        let mut covered = vec![0.0; f_edges.len()];
        for w in uniq.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            let mid = 0.5 * (s0 + s1);
            let k = match cum.binary_search_by(|c| c.partial_cmp(&mid).unwrap()) {
                Ok(i) => i.min(poro_chain.len() - 1),
                Err(i) => i - 1,
            };
            let pe = poro_chain[k];
            let t_chain = |s: f64| (s - cum[k]) / (cum[k + 1] - cum[k]);
            let lo_first = chain_nodes[k] < chain_nodes[k + 1];
            let tp = |s: f64| {
                let t = t_chain(s);
                if lo_first {
                    t
                } else {
                    1.0 - t
                }
            };
            let Some((fi, &(fe, sa, sb))) = f_ranges
                .iter()
                .enumerate()
                .find(|(_, &(_, sa, sb))| sa.min(sb) <= mid && mid <= sa.max(sb))
            else {
                return Err(Error::GeometryMismatch(format!(
                    "no fluid edge covers interface arclength {mid:e}"
                )));
            };
            covered[fi] += s1 - s0;
            // fluid edge parameter, 0 at its lower node (fluid.edges()[fe][0])
            let tf = |s: f64| (s - sa) / (sb - sa);
            let pc = poro.edge_cells(pe)[0].unwrap();
            let fc = fluid.edge_cells(fe)[0].unwrap();
            let n_poro = poro.outward_normal(pe);
            let n_fluid = fluid.outward_normal(fe);
            segments.push(Segment {
                trace: k,
                poro_edge: pe,
                poro_cell: pc,
                fluid_edge: fe,
                fluid_cell: fc,
                t_poro: [tp(s0), tp(s1)],
                t_fluid: [tf(s0), tf(s1)],
                length: s1 - s0,
                n_poro,
                n_fluid,
                tangent: [-n_fluid[1], n_fluid[0]],
            });
        }
        for (fi, &(fe, sa, sb)) in f_ranges.iter().enumerate() {
            if (covered[fi] - (sb - sa).abs()).abs() > 1e-9 * total.max(1.0) {
                return Err(Error::GeometryMismatch(format!(
                    "fluid edge {fe} is not covered by the poroelastic trace"
                )));
            }
        }
        let matching = segments.len() == poro_chain.len() && segments.len() == f_edges.len();
        Ok(InterfacePairing {
            segments,
            poro_edges: poro_chain,
            fluid_edges: f_edges,
            matching,
            length: total,
        })
    }

    /// Gauss points of a segment with exactness `degree` in the edge parameter.
    pub fn segment_quadrature(
        &self,
        seg: &Segment,
        fluid: &Mesh2D,
        poro: &Mesh2D,
        degree: usize,
    ) -> Result<Vec<SegmentPoint>> {
        let rule = edge_rule(degree)?;
        let gp = CellGeom::new(poro.cell_points(seg.poro_cell));
        let mut out = Vec::with_capacity(rule.points.len());
        for (q, w) in rule.points.iter().zip(&rule.weights) {
            let tp = seg.t_poro[0] + q * (seg.t_poro[1] - seg.t_poro[0]);
            let tf = seg.t_fluid[0] + q * (seg.t_fluid[1] - seg.t_fluid[0]);
            let r_poro = edge_reference_point(poro, seg.poro_cell, seg.poro_edge, tp);
            let r_fluid = edge_reference_point(fluid, seg.fluid_cell, seg.fluid_edge, tf);
            for (r, side) in [(r_poro, "poroelastic"), (r_fluid, "fluid")] {
                let eps = 1e-10;
                if r[0] < -eps || r[1] < -eps || r[0] + r[1] > 1.0 + eps {
                    return Err(Error::GeometryMismatch(format!(
                        "segment point falls outside its {side} cell"
                    )));
                }
            }
            out.push(SegmentPoint {
                x: gp.map(r_poro),
                weight: w * seg.length,
                r_fluid,
                r_poro,
                t_poro: tp,
            });
        }
        Ok(out)
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Largest distance between matched fluid and poroelastic quadrature points.
    pub fn max_point_gap(&self, fluid: &Mesh2D, poro: &Mesh2D) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for seg in &self.segments {
            let gf = CellGeom::new(fluid.cell_points(seg.fluid_cell));
            for p in self.segment_quadrature(seg, fluid, poro, 5)? {
                worst = worst.max(dist(gf.map(p.r_fluid), p.x));
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured, Rect, SideTags, Subdomain};

    fn pair(nf: usize, np: usize) -> (Mesh2D, Mesh2D) {
        let ftags = SideTags {
            bottom: BoundaryTag::Interface,
            ..SideTags::plain()
        };
        let ptags = SideTags {
            top: BoundaryTag::Interface,
            ..SideTags::plain()
        };
        let f = build_structured(Rect::new(0.0, 1.0, 0.0, 1.0), nf, nf, Subdomain::Fluid, ftags)
            .unwrap();
        let p = build_structured(Rect::new(0.0, 1.0, -1.0, 0.0), np, np, Subdomain::Poro, ptags)
            .unwrap();
        (f, p)
    }

    #[test]
    fn matching_pairing() {
        let (f, p) = pair(4, 4);
        let ip = InterfacePairing::new(&f, &p, None).unwrap();
        assert!(ip.matching);
        assert_eq!(ip.segments.len(), 4);
        assert!((ip.total_length() - 1.0).abs() < 1e-13);
        for s in &ip.segments {
            assert!((s.n_poro[1] - 1.0).abs() < 1e-14);
            assert!((s.n_fluid[1] + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn non_matching_breakpoints() {
        let (f, p) = pair(3, 2);
        let ip = InterfacePairing::new(&f, &p, None).unwrap();
        assert!(!ip.matching);
        // breakpoints 0, 1/3, 1/2, 2/3, 1
        assert_eq!(ip.segments.len(), 4);
        assert!((ip.total_length() - 1.0).abs() < 1e-13);
        assert!(ip.max_point_gap(&f, &p).unwrap() < 1e-14);
    }

    #[test]
    fn shifted_trace_is_a_mismatch() {
        let (f, _) = pair(2, 2);
        let ptags = SideTags {
            top: BoundaryTag::Interface,
            ..SideTags::plain()
        };
        let p = build_structured(Rect::new(0.0, 1.0, -1.0, -0.01), 2, 2, Subdomain::Poro, ptags)
            .unwrap();
        assert!(matches!(
            InterfacePairing::new(&f, &p, None),
            Err(Error::GeometryMismatch(_))
        ));
    }
}
