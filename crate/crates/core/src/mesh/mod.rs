//! Triangular meshes for the fluid and poroelastic subdomains.

mod fracture;
mod io;
mod map;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use fracture::{build_fracture_domain, FractureGeometry};
pub use io::{mesh_to_string, parse_mesh, read_mesh, write_mesh};
pub use map::{apply_domain_map, DomainMap, FractureMap};

use crate::error::{invalid, Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Fluid,
    Poro,
}

impl Subdomain {
    pub fn as_str(self) -> &'static str {
        match self {
            Subdomain::Fluid => "fluid",
            Subdomain::Poro => "poro",
        }
    }
}

impl FromStr for Subdomain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fluid" => Ok(Subdomain::Fluid),
            "poro" => Ok(Subdomain::Poro),
            _ => Err(format!("unknown subdomain tag '{s}'")),
        }
    }
}

impl fmt::Display for Subdomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Left,
    Right,
    Bottom,
    Top,
    Inflow,
    Interface,
    Wall,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 7] = [
        BoundaryTag::Left,
        BoundaryTag::Right,
        BoundaryTag::Bottom,
        BoundaryTag::Top,
        BoundaryTag::Inflow,
        BoundaryTag::Interface,
        BoundaryTag::Wall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Left => "left",
            BoundaryTag::Right => "right",
            BoundaryTag::Bottom => "bottom",
            BoundaryTag::Top => "top",
            BoundaryTag::Inflow => "inflow",
            BoundaryTag::Interface => "interface",
            BoundaryTag::Wall => "wall",
        }
    }
}

impl FromStr for BoundaryTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        BoundaryTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown boundary tag '{s}'"))
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }
}

/// Tags assigned to the four sides of a structured rectangle mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideTags {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub bottom: BoundaryTag,
    pub top: BoundaryTag,
}

impl SideTags {
    pub fn plain() -> Self {
        SideTags {
            left: BoundaryTag::Left,
            right: BoundaryTag::Right,
            bottom: BoundaryTag::Bottom,
            top: BoundaryTag::Top,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Conforming triangulation with per-cell subdomain tags and tagged boundary edges.
///
/// Local edge `i` of a triangle is the edge opposite local vertex `i`.
/// Global edges are stored with their lower node index first.
#[derive(Clone, Debug)]
pub struct Mesh2D {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    subdomains: Vec<Subdomain>,
    boundary: Vec<BoundaryEdge>,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[usize; 3]>,
    edge_tris: Vec<[Option<usize>; 2]>,
    edge_tags: Vec<Option<BoundaryTag>>,
}

pub const LOCAL_EDGES: [[usize; 2]; 3] = [[1, 2], [0, 2], [0, 1]];

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh2D {
    pub fn new(
        nodes: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        subdomains: Vec<Subdomain>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(invalid("mesh has no triangles"));
        }
        if subdomains.len() != triangles.len() {
            return Err(invalid("one subdomain tag per triangle is required"));
        }
        if nodes.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(invalid("non-finite node coordinate"));
        }
        let n = nodes.len();
        let scale = bounding_diameter(&nodes).max(f64::MIN_POSITIVE);
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(invalid(format!("triangle {t} references a missing node")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateGeometry(format!(
                    "triangle {t} repeats a vertex"
                )));
            }
            let area = signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
            if area <= 1e-14 * scale * scale {
                return Err(Error::DegenerateGeometry(format!(
                    "triangle {t} has non-positive signed area {area:e}"
                )));
            }
        }

        let mut index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_tris: Vec<[Option<usize>; 2]> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (i, le) in LOCAL_EDGES.iter().enumerate() {
                let key = sorted(tri[le[0]], tri[le[1]]);
                let e = *index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_tris.push([None, None]);
                    edges.len() - 1
                });
                match edge_tris[e] {
                    [None, _] => edge_tris[e][0] = Some(t),
                    [Some(_), None] => edge_tris[e][1] = Some(t),
                    _ => {
                        return Err(Error::DegenerateGeometry(format!(
                            "edge ({}, {}) is shared by more than two triangles",
                            key[0], key[1]
                        )))
                    }
                }
                te[i] = e;
            }
            tri_edges.push(te);
        }

        let mut edge_tags = vec![None; edges.len()];
        for b in &boundary {
            let key = sorted(b.nodes[0], b.nodes[1]);
            let e = *index.get(&key).ok_or_else(|| {
                invalid(format!(
                    "boundary edge ({}, {}) is not a mesh edge",
                    key[0], key[1]
                ))
            })?;
            if edge_tris[e][1].is_some() {
                return Err(invalid(format!(
                    "boundary edge ({}, {}) is interior",
                    key[0], key[1]
                )));
            }
            if edge_tags[e].is_some() {
                return Err(invalid(format!(
                    "boundary edge ({}, {}) is tagged twice",
                    key[0], key[1]
                )));
            }
            edge_tags[e] = Some(b.tag);
        }
        for (e, tris) in edge_tris.iter().enumerate() {
            if tris[1].is_none() && edge_tags[e].is_none() {
                return Err(invalid(format!(
                    "boundary edge ({}, {}) has no tag",
                    edges[e][0], edges[e][1]
                )));
            }
        }

        Ok(Mesh2D {
            nodes,
            triangles,
            subdomains,
            boundary,
            edges,
            tri_edges,
            edge_tris,
            edge_tags,
        })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn cell_edges(&self, cell: usize) -> [usize; 3] {
        self.tri_edges[cell]
    }

    pub fn edge_cells(&self, edge: usize) -> [Option<usize>; 2] {
        self.edge_tris[edge]
    }

    pub fn edge_tag(&self, edge: usize) -> Option<BoundaryTag> {
        self.edge_tags[edge]
    }

    pub fn cell_points(&self, cell: usize) -> [Point; 3] {
        let t = self.triangles[cell];
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_points(cell);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, cell: usize) -> Point {
        let [a, b, c] = self.cell_points(cell);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let [a, b] = self.edges[edge];
        dist(self.nodes[a], self.nodes[b])
    }

    /// Longest edge length.
    pub fn h_max(&self) -> f64 {
        (0..self.num_edges())
            .map(|e| self.edge_length(e))
            .fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        (0..self.num_edges())
            .map(|e| self.edge_length(e))
            .fold(f64::INFINITY, f64::min)
    }

    /// Unit normal of a boundary edge pointing out of its only cell.
    pub fn outward_normal(&self, edge: usize) -> Point {
        let cell = self.edge_tris[edge][0].expect("edge has a cell");
        let local = self.tri_edges[cell]
            .iter()
            .position(|&e| e == edge)
            .unwrap();
        cell_outward_normal(self.cell_points(cell), local)
    }

    /// Edge ids carrying `tag`, in global edge order.
    pub fn tagged_edges(&self, tag: BoundaryTag) -> Vec<usize> {
        (0..self.num_edges())
            .filter(|&e| self.edge_tags[e] == Some(tag))
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_area(c)).sum()
    }

    /// Sub-mesh of the cells tagged `sub`; new boundary edges are tagged `cut_tag`.
    pub fn extract(&self, sub: Subdomain, cut_tag: BoundaryTag) -> Result<Mesh2D> {
        let mut map = vec![usize::MAX; self.num_nodes()];
        let mut nodes = Vec::new();
        let mut tris = Vec::new();
        let mut cells = Vec::new();
        for (c, t) in self.triangles.iter().enumerate() {
            if self.subdomains[c] != sub {
                continue;
            }
            let mut nt = [0; 3];
            for (k, &v) in t.iter().enumerate() {
                if map[v] == usize::MAX {
                    map[v] = nodes.len();
                    nodes.push(self.nodes[v]);
                }
                nt[k] = map[v];
            }
            tris.push(nt);
            cells.push(c);
        }
        if tris.is_empty() {
            return Err(invalid(format!("no cells tagged {sub}")));
        }
        let mut boundary = Vec::new();
        for (e, [a, b]) in self.edges.iter().enumerate() {
            let [c0, c1] = self.edge_tris[e];
            let inside = |c: Option<usize>| c.is_some_and(|c| self.subdomains[c] == sub);
            let tag = match (inside(c0), inside(c1)) {
                (true, false) | (false, true) => {
                    if c1.is_some() {
                        cut_tag
                    } else {
                        self.edge_tags[e].unwrap_or(cut_tag)
                    }
                }
                _ => continue,
            };
            boundary.push(BoundaryEdge {
                nodes: [map[*a], map[*b]],
                tag,
            });
        }
        Mesh2D::new(nodes, tris, vec![sub; cells.len()], boundary)
    }

    /// Structural checks: positive areas and a fully tagged boundary.
    pub fn validate(&self) -> Result<()> {
        Mesh2D::new(
            self.nodes.clone(),
            self.triangles.clone(),
            self.subdomains.clone(),
            self.boundary.clone(),
        )
        .map(|_| ())
    }
}

pub fn cell_outward_normal(p: [Point; 3], local_edge: usize) -> Point {
    let [i, j] = LOCAL_EDGES[local_edge];
    let (a, b) = (p[i], p[j]);
    let t = [b[0] - a[0], b[1] - a[1]];
    let len = t[0].hypot(t[1]);
    let mut n = [t[1] / len, -t[0] / len];
    let opp = p[local_edge];
    if (opp[0] - a[0]) * n[0] + (opp[1] - a[1]) * n[1] > 0.0 {
        n = [-n[0], -n[1]];
    }
    n
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn sorted(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn bounding_diameter(nodes: &[Point]) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in nodes {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

/// Uniform `nx` by `ny` grid of the rectangle, each cell split along its
/// lower-left to upper-right diagonal.
pub fn build_structured(
    rect: Rect,
    nx: usize,
    ny: usize,
    subdomain: Subdomain,
    tags: SideTags,
) -> Result<Mesh2D> {
    if nx == 0 || ny == 0 {
        return Err(invalid("structured mesh needs nx, ny >= 1"));
    }
    let (w, h) = (rect.x1 - rect.x0, rect.y1 - rect.y0);
    if !(w > 0.0 && h > 0.0) || !w.is_finite() || !h.is_finite() {
        return Err(Error::DegenerateGeometry(format!(
            "rectangle [{}, {}] x [{}, {}] has no interior",
            rect.x0, rect.x1, rect.y0, rect.y1
        )));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx { rect.x1 } else { rect.x0 + w * i as f64 / nx as f64 };
            let y = if j == ny { rect.y1 } else { rect.y0 + h * j as f64 / ny as f64 };
            nodes.push([x, y]);
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut boundary = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary.push(BoundaryEdge { nodes: [id(i, 0), id(i + 1, 0)], tag: tags.bottom });
        boundary.push(BoundaryEdge { nodes: [id(i, ny), id(i + 1, ny)], tag: tags.top });
    }
    for j in 0..ny {
        boundary.push(BoundaryEdge { nodes: [id(0, j), id(0, j + 1)], tag: tags.left });
        boundary.push(BoundaryEdge { nodes: [id(nx, j), id(nx, j + 1)], tag: tags.right });
    }
    let n = tris.len();
    Mesh2D::new(nodes, tris, vec![subdomain; n], boundary)
}
